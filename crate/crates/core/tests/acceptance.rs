//! Acceptance criteria, each checked against oracles computed here rather
//! than the library's own closed forms. Prints one PASS/FAIL line per
//! criterion.

use num_complex::Complex64;
use qubit_teleport::analysis::{analytic_outcome_probs, haar_random_input, monte_carlo, InputSpec};
use qubit_teleport::linalg::Mat2;
use qubit_teleport::protocols::{
    build_phi_basis, build_projectors, enumerate_branches, regrouped_joint_state, ChannelSpec, InputQubit,
    MorHorodecki, OutcomeLabel, Protocol, QubitAssisted, Teleporter,
};
use qubit_teleport::random::RandomSource;
use qubit_teleport::statevec::StateVector;
use qubit_teleport::verify::{run_checks, VerifyConfig};

const GRID: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
const SEED: u64 = 42;

struct Outcome {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn bound(id: u32, name: &'static str, measured: f64, threshold: f64) -> Outcome {
    Outcome { id, name, passed: measured <= threshold, detail: format!("measured {measured:.3e}, threshold {threshold:.0e}") }
}

fn channel(alpha_sq: f64) -> ChannelSpec {
    ChannelSpec::from_alpha_sq(alpha_sq).unwrap()
}

fn rng(stream: u64) -> RandomSource {
    RandomSource::for_trial(SEED, 0xacce_0000 + stream)
}

fn random_channel(r: &mut RandomSource) -> ChannelSpec {
    channel(0.5 + 0.5 * r.uniform())
}

fn beta_sq(alpha_sq: f64) -> f64 {
    1.0 - alpha_sq
}

fn success_sum(records: &[qubit_teleport::protocols::TeleportationRecord]) -> f64 {
    records.iter().filter(|r| r.success).map(|r| r.branch_probability).sum()
}

fn prob_of(records: &[qubit_teleport::protocols::TeleportationRecord], label: OutcomeLabel) -> f64 {
    records.iter().filter(|r| r.outcome_label == label).map(|r| r.branch_probability).sum()
}

fn exact_success() -> Outcome {
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for x in GRID {
        let ch = channel(x);
        for _ in 0..20 {
            let input = haar_random_input(&mut r);
            worst = worst.max((success_sum(&enumerate_branches(&input, &ch)) - 2.0 * beta_sq(x)).abs());
        }
    }
    bound(1, "exact success probability is 2β² on the α² grid", worst, 1e-12)
}

fn sampled_success() -> Outcome {
    let n = 1_000_000u64;
    let s = monte_carlo(Protocol::QubitAssisted, &channel(0.8), InputSpec::Haar, n, SEED).unwrap();
    let p = 0.4;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    let z = (s.success_rate - p).abs() / sigma;
    Outcome {
        id: 2,
        name: "10⁶ sampled runs at α² = 0.8 succeed at 0.4 within 4σ",
        passed: z <= 4.0,
        detail: format!("rate {:.6}, σ {sigma:.2e}, |z| {z:.2}", s.success_rate),
    }
}

/// Optimal unambiguous discrimination of two equiprobable pure states
/// succeeds with `1 − |⟨u₊|u₋⟩|`.
fn conclusive_probability() -> Outcome {
    let mut worst: f64 = 0.0;
    for x in GRID {
        let (a2, b2) = (x, beta_sq(x));
        let qa = QubitAssisted::new(channel(x));
        for (sub, (p, q)) in [(1, (a2, b2)), (2, (b2, a2))] {
            let n = (p * p + q * q).sqrt();
            let up = StateVector::from_real(&[p / n, q / n]).unwrap();
            let um = StateVector::from_real(&[p / n, -q / n]).unwrap();
            let oracle = 1.0 - up.inner(&um).unwrap().norm();
            let closed_form = 2.0 * b2 * b2 / (a2 * a2 + b2 * b2);
            let povm = qa.subspace_povm(sub);
            for u in [&up, &um] {
                worst = worst.max((povm.conclusive_probability(u) - oracle).abs());
                worst = worst.max((povm.conclusive_probability(u) - closed_form).abs());
            }
        }
    }
    bound(3, "conclusive probability is 2β⁴/(α⁴+β⁴)", worst, 1e-12)
}

fn direct_outcomes() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for x in GRID {
        let ch = channel(x);
        for _ in 0..100 {
            let records = enumerate_branches(&haar_random_input(&mut r), &ch);
            for label in [OutcomeLabel::Phi5, OutcomeLabel::Phi6, OutcomeLabel::Phi7, OutcomeLabel::Phi8] {
                worst = worst.max((prob_of(&records, label) - x * beta_sq(x) / 2.0).abs());
            }
        }
    }
    bound(4, "each Φ₅..Φ₈ outcome has probability α²β²/2", worst, 1e-12)
}

fn overlap_sq(s: &StateVector, a: Complex64, b: Complex64) -> f64 {
    (s.amplitude(0).conj() * a + s.amplitude(1).conj() * b).norm_sqr()
}

fn success_fidelity() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for _ in 0..500 {
        let ch = random_channel(&mut r);
        let input = haar_random_input(&mut r);
        for rec in enumerate_branches(&input, &ch).iter().filter(|rec| rec.success) {
            match &rec.bob_state {
                Some(s) => worst = worst.max((1.0 - overlap_sq(s, input.a, input.b)).abs()),
                None if rec.branch_probability > 1e-20 => missing += 1,
                None => {}
            }
        }
    }
    let mut o = bound(5, "every success branch has fidelity 1", worst, 1e-10);
    o.passed &= missing == 0;
    o
}

fn filtering_equivalence() -> Outcome {
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    for x in GRID {
        let ch = channel(x);
        let input = haar_random_input(&mut r);
        let qa = success_sum(&QubitAssisted::new(ch).enumerate(&input));
        let mh = success_sum(&MorHorodecki::new(ch).enumerate(&input));
        worst = worst.max((qa - mh).abs()).max((mh - 2.0 * beta_sq(x)).abs());
    }
    bound(6, "qubit-assisted and local filtering succeed equally often", worst, 1e-12)
}

/// `(a|0⟩+b|1⟩) ⊗ (α|0⟩+β|1⟩) ⊗ (α|00⟩+β|11⟩)` by index arithmetic.
fn product_state(input: &InputQubit, ch: &ChannelSpec) -> Vec<Complex64> {
    let q0 = [input.a, input.b];
    let q1 = [ch.alpha(), ch.beta()];
    let pair = [ch.alpha(), 0.0, 0.0, ch.beta()];
    (0..16).map(|i| q0[i >> 3] * q1[(i >> 2) & 1] * pair[i & 3]).collect()
}

fn regrouping() -> Outcome {
    let mut r = rng(7);
    let basis = build_phi_basis();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let ch = random_channel(&mut r);
        let input = haar_random_input(&mut r);
        let regrouped = regrouped_joint_state(&input, &ch, &basis);
        for (x, y) in product_state(&input, &ch).iter().zip(regrouped.amplitudes()) {
            worst = worst.max((x - y).norm());
        }
    }
    bound(7, "Φ-basis regrouping reproduces the product state", worst, 1e-12)
}

fn min_eigenvalue(m: &Mat2) -> f64 {
    let (a, d) = (m.get(0, 0).re, m.get(1, 1).re);
    let off = m.get(0, 1).norm();
    (a + d) / 2.0 - (((a - d) / 2.0).powi(2) + off * off).sqrt()
}

fn structure() -> Outcome {
    let basis = build_phi_basis();
    let mut worst: f64 = 0.0;
    for i in 1..=8 {
        for j in 1..=8 {
            let g = basis.phi(i).inner(basis.phi(j)).unwrap();
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - want).norm());
        }
    }
    let projectors = build_projectors(&basis);
    let mut sum = vec![Complex64::new(0.0, 0.0); 64];
    for k in 0..projectors.len() {
        for (s, x) in sum.iter_mut().zip(projectors.operator(k)) {
            *s += x;
        }
    }
    for (idx, s) in sum.iter().enumerate() {
        let want = if idx / 8 == idx % 8 { 1.0 } else { 0.0 };
        worst = worst.max((s - want).norm());
    }
    let mut min_eig = f64::INFINITY;
    for x in GRID {
        let qa = QubitAssisted::new(channel(x));
        let mh = MorHorodecki::new(channel(x));
        for povm in [qa.subspace_povm(1), qa.subspace_povm(2), mh.filter()] {
            let total = povm.effects().iter().fold(Mat2::zero(), |acc, e| acc + *e);
            worst = worst.max((total - Mat2::identity()).max_abs());
            for e in povm.effects() {
                min_eig = min_eig.min(min_eigenvalue(e));
            }
        }
    }
    let mut o = bound(8, "Φ Gram = I₈, ΣPᵢ = I₈, POVMs complete and positive", worst, 1e-12);
    o.passed &= min_eig >= -1e-12;
    o.detail.push_str(&format!(", min effect eigenvalue {min_eig:.3e}"));
    o
}

fn haar_subspace_average() -> Outcome {
    let ch = channel(0.8);
    let mut r = rng(9);
    let n = 100_000;
    let samples: Vec<f64> = (0..n)
        .map(|_| {
            let records = enumerate_branches(&haar_random_input(&mut r), &ch);
            [OutcomeLabel::Subspace1Plus, OutcomeLabel::Subspace1Minus, OutcomeLabel::Subspace1Fail]
                .iter()
                .map(|&l| prob_of(&records, l))
                .sum()
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    let expected = (0.64 + 0.04) / 2.0;
    let z = (mean - expected).abs() / se;
    Outcome {
        id: 9,
        name: "Haar-averaged subspace-1 probability is (α⁴+β⁴)/2",
        passed: z <= 3.0,
        detail: format!("mean {mean:.6}, expected {expected:.6}, |z| {z:.2}"),
    }
}

fn oracle_agreement() -> Outcome {
    let mut r = rng(10);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let ch = random_channel(&mut r);
        let input = haar_random_input(&mut r);
        let (a2, b2) = (ch.alpha_sq(), ch.beta_sq());
        let (ia, ib) = (input.a.norm_sqr(), input.b.norm_sqr());
        let s1 = ia * a2 * a2 + ib * b2 * b2;
        let s2 = ia * b2 * b2 + ib * a2 * a2;
        let half_b4 = b2 * b2 / 2.0;
        let oracle = [
            a2 * b2 / 2.0,
            a2 * b2 / 2.0,
            a2 * b2 / 2.0,
            a2 * b2 / 2.0,
            half_b4,
            half_b4,
            s1 - 2.0 * half_b4,
            half_b4,
            half_b4,
            s2 - 2.0 * half_b4,
        ];
        let records = enumerate_branches(&input, &ch);
        let analytic = analytic_outcome_probs(&ch, &input);
        for (label, want) in OutcomeLabel::QUBIT_ASSISTED.iter().zip(oracle) {
            worst = worst.max((prob_of(&records, *label) - want).abs());
            worst = worst.max((analytic.per_outcome[label] - want).abs());
        }
    }
    bound(10, "closed forms agree with enumeration on all ten branches", worst, 1e-10)
}

fn main() {
    let outcomes = [
        exact_success(),
        sampled_success(),
        conclusive_probability(),
        direct_outcomes(),
        success_fidelity(),
        filtering_equivalence(),
        regrouping(),
        structure(),
        haar_subspace_average(),
        oracle_agreement(),
    ];
    for o in &outcomes {
        println!("{} {:>2}. {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
    }
    let mut failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();

    println!("verify check list, seed 42:");
    for c in run_checks(&VerifyConfig::default()) {
        println!("  {c}");
        if !c.passed {
            failed.push(format!("verify {}", c.id));
        }
    }
    println!("verify check list, seed 12345, quick:");
    for c in run_checks(&VerifyConfig { seed: 12345, quick: true }) {
        println!("  {c}");
        if !c.passed {
            failed.push(format!("verify quick {}", c.id));
        }
    }

    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        eprintln!("acceptance: failed {failed:?}");
        std::process::exit(1);
    }
}
