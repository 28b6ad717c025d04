//! Qubit-assisted conclusive teleportation.

use super::{ChannelSpec, CorrectionTable, InputQubit, OutcomeLabel, TeleportationRecord, Teleporter};
use crate::measurement::{
    build_idp_povm, measure_projective, povm_branches, projective_branches, apply_povm, EffectLabel, Povm, ProjectorSet,
};
use crate::random::RandomSource;
use crate::statevec::{dominant_factor, extract_subsystem, tensor_product, QubitLabel, StateVector, FACTOR_TOL};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Alice's qubits: input, ancilla, channel half.
const ALICE: [QubitLabel; 3] = [QubitLabel(0), QubitLabel(1), QubitLabel(2)];

/// The eight orthonormal three-qubit states Alice measures against.
///
/// `states()[0..4]` are `|000⟩, |111⟩, |011⟩, |100⟩`; the remaining four are
/// `(|010⟩ ± |101⟩)/√2` and `(|001⟩ ± |110⟩)/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiBasis {
    states: [StateVector; 8],
}

impl PhiBasis {
    pub fn states(&self) -> &[StateVector; 8] {
        &self.states
    }

    /// `Φ_n` with the conventional 1-based numbering.
    pub fn phi(&self, n: usize) -> &StateVector {
        &self.states[n - 1]
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.states.iter().enumerate() {
            for (j, v) in self.states.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((u.inner(v).expect("same size") - target).norm());
            }
        }
        worst
    }
}

pub fn build_phi_basis() -> PhiBasis {
    let basis = |i| StateVector::basis(3, i);
    let pair = |i: usize, j: usize, sign: f64| {
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[i] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[j] = Complex64::new(sign * FRAC_1_SQRT_2, 0.0);
        StateVector::new(amps).expect("normalized by construction")
    };
    PhiBasis {
        states: [
            basis(0b000),
            basis(0b111),
            basis(0b011),
            basis(0b100),
            pair(0b010, 0b101, 1.0),
            pair(0b010, 0b101, -1.0),
            pair(0b001, 0b110, 1.0),
            pair(0b001, 0b110, -1.0),
        ],
    }
}

/// `P₁ = P[Φ₁]+P[Φ₂]`, `P₂ = P[Φ₃]+P[Φ₄]`, `P₃..P₆ = P[Φ₅]..P[Φ₈]` on
/// Alice's three qubits.
pub fn build_projectors(basis: &PhiBasis) -> ProjectorSet {
    let s = basis.states();
    let projectors = vec![
        vec![s[0].clone(), s[1].clone()],
        vec![s[2].clone(), s[3].clone()],
        vec![s[4].clone()],
        vec![s[5].clone()],
        vec![s[6].clone()],
        vec![s[7].clone()],
    ];
    ProjectorSet::new(ALICE.to_vec(), projectors).expect("Φ basis is orthonormal and complete")
}

/// `|φ⟩₁ ⊗ |χ⟩₂ ⊗ |ψ⟩_AB` with the ancilla `|χ⟩ = α|0⟩ + β|1⟩`.
pub fn prepare_joint_state(input: &InputQubit, channel: &ChannelSpec) -> StateVector {
    let alice_side = tensor_product(&input.state(), &channel.ancilla_state());
    tensor_product(&alice_side, &channel.pair_state())
}

/// The same four-qubit state rebuilt from its regrouping over the Φ basis:
/// two rank-2 blocks that pair Alice's subspace states with Bob's
/// `(a, b), (a, −b), (b, a), (−b, a)` and four direct terms weighted
/// `αβ/√2`.
pub fn regrouped_joint_state(input: &InputQubit, channel: &ChannelSpec, basis: &PhiBasis) -> StateVector {
    let (a, b) = (input.a, input.b);
    let (a2, b2) = (channel.alpha_sq(), channel.beta_sq());
    let bob = |x: Complex64, y: Complex64| StateVector::qubit(x, y).expect("input is normalized");
    let bob_ab = bob(a, b);
    let bob_a_mb = bob(a, -b);
    let bob_ba = bob(b, a);
    let bob_mb_a = bob(-b, a);
    let phi = |n| basis.phi(n);

    let direct = channel.alpha() * channel.beta() * FRAC_1_SQRT_2;
    let terms: [(f64, &StateVector, &StateVector); 12] = [
        (0.5 * a2, phi(1), &bob_ab),
        (0.5 * b2, phi(2), &bob_ab),
        (0.5 * a2, phi(1), &bob_a_mb),
        (-0.5 * b2, phi(2), &bob_a_mb),
        (0.5 * b2, phi(3), &bob_ba),
        (0.5 * a2, phi(4), &bob_ba),
        (0.5 * b2, phi(3), &bob_mb_a),
        (-0.5 * a2, phi(4), &bob_mb_a),
        (direct, phi(5), &bob_ab),
        (direct, phi(6), &bob_a_mb),
        (direct, phi(7), &bob_ba),
        (direct, phi(8), &bob_mb_a),
    ];
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    for (coeff, alice, bob) in terms {
        for (acc, z) in amps.iter_mut().zip(tensor_product(alice, bob).amplitudes()) {
            *acc += coeff * z;
        }
    }
    StateVector::new(amps).expect("regrouping preserves the norm")
}

/// One of the two rank-2 projector outcomes.
struct Subspace {
    /// Φ states mapped to logical `|0̃⟩`, `|1̃⟩`.
    pair: [StateVector; 2],
    povm: Povm,
    labels: [OutcomeLabel; 3],
}

impl Subspace {
    /// Re-express a post-measurement state living in `span(pair) ⊗ Bob` as a
    /// two-qubit state `logical ⊗ Bob`.
    fn to_logical(&self, post: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(4);
        for phi in &self.pair {
            for bob in 0..2 {
                let z: Complex64 = phi
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p.conj() * post.amplitude(i * 2 + bob))
                    .sum();
                amps.push(z);
            }
        }
        StateVector::normalized(amps).expect("post state lies in the subspace")
    }

    fn label(&self, effect: EffectLabel) -> OutcomeLabel {
        match effect {
            EffectLabel::IdentifyPlus => self.labels[0],
            EffectLabel::IdentifyMinus => self.labels[1],
            _ => self.labels[2],
        }
    }
}

/// The qubit-assisted protocol prepared for one channel: Φ basis, the six
/// projectors and one discrimination POVM per rank-2 subspace.
pub struct QubitAssisted {
    channel: ChannelSpec,
    basis: PhiBasis,
    projectors: ProjectorSet,
    subspaces: [Subspace; 2],
    table: CorrectionTable,
}

impl QubitAssisted {
    pub fn new(channel: ChannelSpec) -> Self {
        let basis = build_phi_basis();
        let projectors = build_projectors(&basis);
        let (a2, b2) = (channel.alpha_sq(), channel.beta_sq());
        let states = |x: f64, y: f64| {
            (
                StateVector::normalized(vec![Complex64::new(x, 0.0), Complex64::new(y, 0.0)]).expect("nonzero"),
                StateVector::normalized(vec![Complex64::new(x, 0.0), Complex64::new(-y, 0.0)]).expect("nonzero"),
            )
        };
        // Subspace {Φ₁, Φ₂} discriminates (α², ±β²); {Φ₃, Φ₄} discriminates (β², ±α²).
        let (u_plus, u_minus) = states(a2, b2);
        let (v_plus, v_minus) = states(b2, a2);
        let s = basis.states();
        let subspaces = [
            Subspace {
                pair: [s[0].clone(), s[1].clone()],
                povm: build_idp_povm(&u_plus, &u_minus).expect("single-qubit states"),
                labels: [OutcomeLabel::Subspace1Plus, OutcomeLabel::Subspace1Minus, OutcomeLabel::Subspace1Fail],
            },
            Subspace {
                pair: [s[2].clone(), s[3].clone()],
                povm: build_idp_povm(&v_plus, &v_minus).expect("single-qubit states"),
                labels: [OutcomeLabel::Subspace2Plus, OutcomeLabel::Subspace2Minus, OutcomeLabel::Subspace2Fail],
            },
        ];
        Self { channel, basis, projectors, subspaces, table: CorrectionTable::default() }
    }

    pub fn channel(&self) -> &ChannelSpec {
        &self.channel
    }

    pub fn basis(&self) -> &PhiBasis {
        &self.basis
    }

    pub fn projectors(&self) -> &ProjectorSet {
        &self.projectors
    }

    /// Discrimination POVM for subspace 1 (`{Φ₁, Φ₂}`) or 2 (`{Φ₃, Φ₄}`).
    pub fn subspace_povm(&self, subspace: usize) -> &Povm {
        &self.subspaces[subspace - 1].povm
    }

    pub fn correction_table(&self) -> &CorrectionTable {
        &self.table
    }

    /// Record for a rank-1 outcome `P₃..P₆` (projector index 2..=5).
    fn direct_record(&self, projector: usize, probability: f64, post: Option<&StateVector>) -> TeleportationRecord {
        let label = OutcomeLabel::QUBIT_ASSISTED[projector - 2];
        let bob = post.map(|s| {
            extract_subsystem(s, &ALICE, &self.basis.states()[projector + 2]).expect("rank-1 outcome leaves Bob factorized")
        });
        TeleportationRecord::new(&self.table, label, probability, bob)
    }

    /// Record for a POVM result inside a subspace.
    fn subspace_record(
        &self,
        subspace: &Subspace,
        effect: usize,
        probability: f64,
        post: Option<&StateVector>,
    ) -> TeleportationRecord {
        let label = subspace.label(subspace.povm.labels()[effect]);
        let conclusive = self.table.lookup(label).is_some();
        let bob = post.map(|s| {
            let (_, bob, residual) = dominant_factor(s, &[QubitLabel(0)]).expect("two-qubit state");
            assert!(
                !conclusive || residual <= FACTOR_TOL,
                "conclusive POVM result left Bob entangled (residual {residual:e})"
            );
            bob
        });
        TeleportationRecord::new(&self.table, label, probability, bob)
    }

    fn subspace_branches(&self, index: usize, probability: f64, post: Option<&StateVector>, out: &mut Vec<TeleportationRecord>) {
        let sub = &self.subspaces[index];
        match post {
            Some(post) => {
                let logical = sub.to_logical(post);
                let branches = povm_branches(&logical, &sub.povm, QubitLabel(0)).expect("valid POVM");
                for b in &branches {
                    out.push(self.subspace_record(sub, b.outcome_index, probability * b.probability, b.post_state.as_ref()));
                }
            }
            None => {
                // Unreachable subspace: keep the tree shape, all weight on failure.
                for (effect, _) in sub.povm.labels().iter().enumerate() {
                    let fail = sub.povm.labels()[effect] == EffectLabel::Inconclusive;
                    out.push(self.subspace_record(sub, effect, if fail { probability } else { 0.0 }, None));
                }
            }
        }
    }
}

impl Teleporter for QubitAssisted {
    fn run(&self, input: &InputQubit, randomness: &mut RandomSource) -> TeleportationRecord {
        let joint = prepare_joint_state(input, &self.channel);
        let first = measure_projective(&joint, &self.projectors, randomness).expect("complete projector set");
        match first.outcome_index {
            k @ 2..=5 => self.direct_record(k, first.probability, Some(&first.post_state)),
            k => {
                let sub = &self.subspaces[k];
                let logical = sub.to_logical(&first.post_state);
                let second = apply_povm(&logical, &sub.povm, QubitLabel(0), randomness).expect("valid POVM");
                self.subspace_record(sub, second.outcome_index, first.probability * second.probability, Some(&second.post_state))
            }
        }
    }

    fn enumerate(&self, input: &InputQubit) -> Vec<TeleportationRecord> {
        let joint = prepare_joint_state(input, &self.channel);
        let first = projective_branches(&joint, &self.projectors).expect("complete projector set");
        let mut records = Vec::with_capacity(10);
        for b in &first[2..] {
            records.push(self.direct_record(b.outcome_index, b.probability, b.post_state.as_ref()));
        }
        for (i, b) in first[..2].iter().enumerate() {
            self.subspace_branches(i, b.probability, b.post_state.as_ref(), &mut records);
        }
        records
    }
}

/// Sample one run of the qubit-assisted protocol.
pub fn run_qubit_assisted(input: &InputQubit, channel: &ChannelSpec, randomness: &mut RandomSource) -> TeleportationRecord {
    QubitAssisted::new(*channel).run(input, randomness)
}

/// Every branch of the qubit-assisted outcome tree with exact
/// probabilities: four direct outcomes, then three POVM results per
/// subspace.
pub fn enumerate_branches(input: &InputQubit, channel: &ChannelSpec) -> Vec<TeleportationRecord> {
    QubitAssisted::new(*channel).enumerate(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::born_probabilities;
    use crate::protocols::{success_probability, Correction};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn phi_basis_entries() {
        let b = build_phi_basis();
        assert_eq!(b.phi(1), &StateVector::basis(3, 0));
        let h = FRAC_1_SQRT_2;
        assert_eq!(b.phi(5).amplitude(2), c(h));
        assert_eq!(b.phi(5).amplitude(5), c(h));
        assert!(b.gram_defect() < 1e-15);
    }

    #[test]
    fn projector_structure() {
        let p = build_projectors(&build_phi_basis());
        assert_eq!(p.ranks(), vec![2, 2, 1, 1, 1, 1]);
        assert_eq!(p.ranks().iter().sum::<usize>(), 8);
        assert!(p.completeness_residual() < 1e-12);
        let (p1, p2) = (p.operator(0), p.operator(1));
        for r in 0..8 {
            for col in 0..8 {
                let prod: Complex64 = (0..8).map(|k| p1[r * 8 + k] * p2[k * 8 + col]).sum();
                assert!(prod.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn joint_state_at_symmetric_point() {
        let ch = ChannelSpec::from_alpha_sq(0.5).unwrap();
        let s = prepare_joint_state(&InputQubit::real(1.0, 0.0).unwrap(), &ch);
        for i in 0..16 {
            let expected = if [0, 3, 4, 7].contains(&i) { 0.5 } else { 0.0 };
            assert!((s.amplitude(i) - c(expected)).norm() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn unentangled_channel_is_product() {
        let ch = ChannelSpec::from_alpha_sq(1.0).unwrap();
        let input = InputQubit::real(0.6, 0.8).unwrap();
        let s = prepare_joint_state(&input, &ch);
        let expected = tensor_product(&tensor_product(&input.state(), &StateVector::zero()), &StateVector::basis(2, 0));
        assert_eq!(s, expected);
    }

    #[test]
    fn regrouping_matches_product() {
        let ch = ChannelSpec::from_alpha_sq(0.7).unwrap();
        let input = InputQubit::new(c(0.6), Complex64::new(0.0, 0.8)).unwrap();
        let direct = prepare_joint_state(&input, &ch);
        let regrouped = regrouped_joint_state(&input, &ch, &build_phi_basis());
        assert!(direct.max_abs_diff(&regrouped).unwrap() < 1e-15);
    }

    #[test]
    fn born_probabilities_point_eight() {
        let ch = ChannelSpec::from_alpha_sq(0.8).unwrap();
        let input = InputQubit::real(0.6, 0.8).unwrap();
        let p = born_probabilities(&prepare_joint_state(&input, &ch), &build_projectors(&build_phi_basis())).unwrap();
        // a²α⁴+b²β⁴ = 0.36·0.64 + 0.64·0.04, a²β⁴+b²α⁴ = 0.36·0.04 + 0.64·0.64
        let expected = [0.256, 0.424, 0.08, 0.08, 0.08, 0.08];
        for (x, y) in p.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn phi5_branch_hands_bob_the_input() {
        let ch = ChannelSpec::from_alpha_sq(0.8).unwrap();
        let input = InputQubit::new(c(0.6), Complex64::new(0.0, 0.8)).unwrap();
        let joint = prepare_joint_state(&input, &ch);
        let branches = projective_branches(&joint, &build_projectors(&build_phi_basis())).unwrap();
        let post = branches[2].post_state.as_ref().unwrap();
        let bob = extract_subsystem(post, &ALICE, build_phi_basis().phi(5)).unwrap();
        assert!(bob.max_abs_diff(&input.state()).unwrap() < 1e-12);
    }

    #[test]
    fn tree_has_ten_branches_summing_to_one() {
        let ch = ChannelSpec::from_alpha_sq(0.8).unwrap();
        let input = InputQubit::real(0.6, 0.8).unwrap();
        let tree = enumerate_branches(&input, &ch);
        assert_eq!(tree.len(), 10);
        let labels: Vec<_> = tree.iter().map(|r| r.outcome_label).collect();
        assert_eq!(labels, OutcomeLabel::QUBIT_ASSISTED.to_vec());
        let total: f64 = tree.iter().map(|r| r.branch_probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((success_probability(&tree) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn subspace_conclusive_weight_is_beta_fourth() {
        let ch = ChannelSpec::from_alpha_sq(0.65).unwrap();
        let input = InputQubit::new(Complex64::new(0.3, 0.4), Complex64::new(0.0, -(0.75f64).sqrt())).unwrap();
        let tree = enumerate_branches(&input, &ch);
        let b4 = ch.beta_sq() * ch.beta_sq();
        let sub1: f64 = tree[4..6].iter().map(|r| r.branch_probability).sum();
        let sub2: f64 = tree[7..9].iter().map(|r| r.branch_probability).sum();
        assert!((sub1 - b4).abs() < 1e-12 && (sub2 - b4).abs() < 1e-12);
    }

    #[test]
    fn every_success_has_unit_fidelity() {
        let ch = ChannelSpec::from_alpha_sq(0.75).unwrap();
        let input = InputQubit::new(Complex64::new(0.1, 0.7), Complex64::new(0.7, -0.1)).unwrap();
        for r in enumerate_branches(&input, &ch).iter().filter(|r| r.success) {
            assert!((r.fidelity_with(&input).unwrap() - 1.0).abs() < 1e-10, "{}", r.outcome_label);
        }
    }

    #[test]
    fn symmetric_channel_never_fails() {
        let ch = ChannelSpec::maximally_entangled();
        let input = InputQubit::real(0.28, 0.96).unwrap();
        let tree = enumerate_branches(&input, &ch);
        assert!((success_probability(&tree) - 1.0).abs() < 1e-12);
        for r in tree.iter().filter(|r| !r.success) {
            assert!(r.branch_probability < 1e-12);
        }
    }

    #[test]
    fn degenerate_channel_always_fails() {
        let ch = ChannelSpec::from_alpha_sq(1.0).unwrap();
        let input = InputQubit::real(0.6, 0.8).unwrap();
        let tree = enumerate_branches(&input, &ch);
        assert_eq!(success_probability(&tree), 0.0);
        let mut rng = RandomSource::seeded(11);
        for _ in 0..50 {
            let r = run_qubit_assisted(&input, &ch, &mut rng);
            assert!(!r.success);
            assert_eq!(r.correction, Correction::Identity);
        }
    }

    #[test]
    fn sampled_run_is_reproducible() {
        let ch = ChannelSpec::from_alpha_sq(0.8).unwrap();
        let input = InputQubit::real(0.6, 0.8).unwrap();
        let a = run_qubit_assisted(&input, &ch, &mut RandomSource::seeded(3));
        let b = run_qubit_assisted(&input, &ch, &mut RandomSource::seeded(3));
        assert_eq!(a, b);
        assert!(a.bob_state.is_some());
    }
}
