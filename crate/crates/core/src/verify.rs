//! The full check list behind `teleport-sim verify`.
//!
//! Exact checks run at fixed tolerances; statistical checks gate at a fixed
//! number of standard errors, so `--quick` only shrinks the sample sizes and
//! the gates widen with them.

use crate::analysis::{analytic_outcome_probs, haar_random_input, monte_carlo, success_total, InputSpec};
use crate::measurement::born_probabilities;
use crate::protocols::{
    build_phi_basis, build_projectors, prepare_joint_state, regrouped_joint_state, success_probability, ChannelSpec,
    InputQubit, MorHorodecki, OutcomeLabel, Protocol, QubitAssisted, Teleporter,
};
use crate::random::RandomSource;
use crate::statevec::StateVector;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const ALPHA_SQ_GRID: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

pub const EXACT: f64 = 1e-12;
pub const BRANCH_ORACLE: f64 = 1e-10;
pub const FIDELITY: f64 = 1e-10;
pub const MONTE_CARLO_SIGMAS: f64 = 4.0;
pub const HAAR_AVERAGE_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub quick: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 42, quick: false }
    }
}

impl VerifyConfig {
    pub fn success_trials(&self) -> u64 {
        if self.quick {
            10_000
        } else {
            1_000_000
        }
    }

    pub fn haar_samples(&self) -> u64 {
        if self.quick {
            10_000
        } else {
            100_000
        }
    }

    /// Independent stream per check so checks do not share draws.
    fn rng(&self, check: u64) -> RandomSource {
        RandomSource::for_trial(self.seed, 1 << 40 | check)
    }
}

/// Outcome of one check. `measured` is the worst deviation (or statistic)
/// observed and `threshold` the bound it was held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {} (measured {:.3e}, threshold {:.3e}){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.threshold,
            if self.detail.is_empty() { String::new() } else { format!(": {}", self.detail) }
        )
    }
}

fn bounded(id: u32, name: &str, measured: f64, threshold: f64, detail: String) -> Check {
    Check { id, name: name.to_string(), passed: measured <= threshold, measured, threshold, detail }
}

fn random_channel(rng: &mut RandomSource) -> ChannelSpec {
    ChannelSpec::from_alpha_sq(0.5 + 0.5 * rng.uniform()).expect("in range")
}

fn grid_channels() -> impl Iterator<Item = ChannelSpec> {
    ALPHA_SQ_GRID.iter().map(|&x| ChannelSpec::from_alpha_sq(x).expect("grid is in range"))
}

/// Total success equals `2β²` on the α grid for random inputs.
pub fn check_exact_success(cfg: &VerifyConfig) -> Check {
    let mut rng = cfg.rng(1);
    let mut worst: f64 = 0.0;
    for ch in grid_channels() {
        let protocol = QubitAssisted::new(ch);
        for _ in 0..20 {
            let input = haar_random_input(&mut rng);
            let p = success_probability(&protocol.enumerate(&input));
            worst = worst.max((p - 2.0 * ch.beta_sq()).abs());
        }
    }
    bounded(1, "exact success probability equals 2β² on the α grid", worst, EXACT, "6 α² values × 20 inputs".into())
}

/// Sampled success rate at α² = 0.8 within 4σ of 0.4.
pub fn check_sampled_success(cfg: &VerifyConfig) -> Check {
    let ch = ChannelSpec::from_alpha_sq(0.8).expect("in range");
    let n = cfg.success_trials();
    let summary = monte_carlo(Protocol::QubitAssisted, &ch, InputSpec::Haar, n, cfg.seed).expect("n > 0");
    let p = success_total(&ch);
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    let z = (summary.success_rate - p).abs() / sigma;
    bounded(
        2,
        "sampled success rate at α² = 0.8 matches 2β²",
        z,
        MONTE_CARLO_SIGMAS,
        format!("{} trials, rate {:.6}, σ {:.2e}, |z| shown", n, summary.success_rate, sigma),
    )
}

/// The discrimination POVMs reach `2β⁴/(α⁴+β⁴)` on every state they
/// discriminate.
pub fn check_conclusive_probability(_cfg: &VerifyConfig) -> Check {
    let mut worst: f64 = 0.0;
    for ch in grid_channels() {
        let (a2, b2) = (ch.alpha_sq(), ch.beta_sq());
        let (a4, b4) = (a2 * a2, b2 * b2);
        let expected = 2.0 * b4 / (a4 + b4);
        let protocol = QubitAssisted::new(ch);
        for (sub, (x, y)) in [(1, (a2, b2)), (2, (b2, a2))] {
            let povm = protocol.subspace_povm(sub);
            let n = (x * x + y * y).sqrt();
            for sign in [1.0, -1.0] {
                let u = StateVector::from_real(&[x / n, sign * y / n]).expect("normalized");
                worst = worst.max((povm.conclusive_probability(&u) - expected).abs());
            }
        }
    }
    bounded(3, "POVM conclusive probability equals 2β⁴/(α⁴+β⁴)", worst, EXACT, "both subspaces, both states".into())
}

/// Each of Φ₅..Φ₈ occurs with probability `α²β²/2` whatever the input.
pub fn check_direct_outcomes(cfg: &VerifyConfig) -> Check {
    let mut rng = cfg.rng(4);
    let mut worst: f64 = 0.0;
    for ch in grid_channels() {
        let protocol = QubitAssisted::new(ch);
        let expected = ch.alpha_sq() * ch.beta_sq() / 2.0;
        for _ in 0..100 {
            let input = haar_random_input(&mut rng);
            for r in &protocol.enumerate(&input)[..4] {
                worst = worst.max((r.branch_probability - expected).abs());
            }
        }
    }
    bounded(4, "direct outcomes Φ₅..Φ₈ each occur with α²β²/2", worst, EXACT, "6 α² values × 100 Haar inputs".into())
}

/// Every successful branch hands Bob the input with fidelity one.
pub fn check_success_fidelity(cfg: &VerifyConfig) -> Check {
    let mut rng = cfg.rng(5);
    let mut worst: f64 = 0.0;
    let mut branches = 0;
    for _ in 0..500 {
        let ch = random_channel(&mut rng);
        let input = haar_random_input(&mut rng);
        for r in QubitAssisted::new(ch).enumerate(&input).iter().filter(|r| r.success && r.bob_state.is_some()) {
            worst = worst.max(1.0 - r.fidelity_with(&input).expect("state present"));
            branches += 1;
        }
    }
    bounded(5, "successful branches have fidelity 1", worst, FIDELITY, format!("{branches} branches over 500 configurations"))
}

/// Exact success probability matches local filtering on the α grid.
pub fn check_filtering_equivalence(cfg: &VerifyConfig) -> Check {
    let mut rng = cfg.rng(6);
    let mut worst: f64 = 0.0;
    for ch in grid_channels() {
        let input = haar_random_input(&mut rng);
        let ours = success_probability(&QubitAssisted::new(ch).enumerate(&input));
        let theirs = success_probability(&MorHorodecki::new(ch).enumerate(&input));
        worst = worst.max((ours - theirs).abs());
    }
    bounded(6, "qubit-assisted and filtering success probabilities agree", worst, EXACT, String::new())
}

/// The Φ-basis regrouping rebuilds the four-qubit product state.
pub fn check_regrouping(cfg: &VerifyConfig) -> Check {
    let mut rng = cfg.rng(7);
    let basis = build_phi_basis();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let ch = random_channel(&mut rng);
        let input = haar_random_input(&mut rng);
        let diff = prepare_joint_state(&input, &ch)
            .max_abs_diff(&regrouped_joint_state(&input, &ch, &basis))
            .expect("both four-qubit");
        worst = worst.max(diff);
    }
    bounded(7, "Φ-basis regrouping equals the product state", worst, EXACT, "100 random draws".into())
}

/// Gram matrix, projector completeness and POVM validity.
pub fn check_structure(_cfg: &VerifyConfig) -> Check {
    let basis = build_phi_basis();
    let projectors = build_projectors(&basis);
    let mut worst = basis.gram_defect().max(projectors.completeness_residual());
    let mut min_eig = f64::INFINITY;
    for ch in grid_channels() {
        let qa = QubitAssisted::new(ch);
        let mh = MorHorodecki::new(ch);
        for report in [qa.subspace_povm(1).validation(), qa.subspace_povm(2).validation(), mh.filter().validation()] {
            worst = worst.max(report.completeness_residual);
            min_eig = min_eig.min(report.min_eigenvalue);
        }
    }
    let mut c = bounded(8, "Φ Gram = I, ΣP = I, POVMs complete and positive", worst, EXACT, format!("min effect eigenvalue {min_eig:.3e}"));
    c.passed &= min_eig >= -EXACT;
    c
}

/// Averaged over Haar inputs, landing in `{Φ₁, Φ₂}` has probability
/// `(α⁴+β⁴)/2`. The inputs are the ones a sampled run with the same seed
/// draws.
pub fn check_haar_subspace_average(cfg: &VerifyConfig) -> Check {
    let ch = ChannelSpec::from_alpha_sq(0.8).expect("in range");
    let projectors = build_projectors(&build_phi_basis());
    let n = cfg.haar_samples();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for trial in 0..n {
        let input = haar_random_input(&mut RandomSource::for_trial(cfg.seed, trial));
        let p = born_probabilities(&prepare_joint_state(&input, &ch), &projectors).expect("complete set")[0];
        sum += p;
        sum_sq += p * p;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean) * nf / (nf - 1.0);
    let se = (var / nf).sqrt();
    let expected = (ch.alpha_sq().powi(2) + ch.beta_sq().powi(2)) / 2.0;
    let z = (mean - expected).abs() / se;
    bounded(
        9,
        "Haar-averaged subspace-1 probability equals (α⁴+β⁴)/2",
        z,
        HAAR_AVERAGE_SIGMAS,
        format!("{n} inputs, mean {mean:.6}, expected {expected:.6}, |z| shown"),
    )
}

/// Closed forms agree with state-vector enumeration on all ten branches.
pub fn check_oracle_agreement(cfg: &VerifyConfig) -> Check {
    let mut rng = cfg.rng(10);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let ch = random_channel(&mut rng);
        let input: InputQubit = haar_random_input(&mut rng);
        let analytic = analytic_outcome_probs(&ch, &input);
        let tree: BTreeMap<OutcomeLabel, f64> =
            QubitAssisted::new(ch).enumerate(&input).iter().map(|r| (r.outcome_label, r.branch_probability)).collect();
        for label in OutcomeLabel::QUBIT_ASSISTED {
            worst = worst.max((analytic.per_outcome[&label] - tree[&label]).abs());
        }
    }
    bounded(10, "closed forms match enumeration on all ten branches", worst, BRANCH_ORACLE, "200 random configurations".into())
}

pub fn run_checks(cfg: &VerifyConfig) -> Vec<Check> {
    vec![
        check_exact_success(cfg),
        check_sampled_success(cfg),
        check_conclusive_probability(cfg),
        check_direct_outcomes(cfg),
        check_success_fidelity(cfg),
        check_filtering_equivalence(cfg),
        check_regrouping(cfg),
        check_structure(cfg),
        check_haar_subspace_average(cfg),
        check_oracle_agreement(cfg),
    ]
}
