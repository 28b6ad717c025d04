//! Reference protocols: standard teleportation over a maximally entangled
//! pair, and conclusive teleportation by local filtering of the channel.

use super::{ChannelSpec, CorrectionTable, InputQubit, OutcomeLabel, TeleportationRecord, Teleporter};
use crate::linalg::Mat2;
use crate::measurement::{apply_povm, measure_projective, povm_branches, projective_branches, EffectLabel, Povm, ProjectorSet};
use crate::random::RandomSource;
use crate::statevec::{dominant_factor, extract_subsystem, tensor_product, QubitLabel, StateVector};

// Register layout for both baselines: input, Alice's half, Bob's half.
const BELL_PAIR: [QubitLabel; 2] = [QubitLabel(0), QubitLabel(1)];
const ALICE_HALF: QubitLabel = QubitLabel(1);

/// Bell measurement on the input and Alice's half, in the order
/// Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.
fn bell_projectors() -> ProjectorSet {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = |amps: [f64; 4]| vec![StateVector::from_real(&amps).expect("normalized")];
    ProjectorSet::new(
        BELL_PAIR.to_vec(),
        vec![bell([h, 0.0, 0.0, h]), bell([h, 0.0, 0.0, -h]), bell([0.0, h, h, 0.0]), bell([0.0, h, -h, 0.0])],
    )
    .expect("Bell basis is orthonormal and complete")
}

/// The Bell-measurement half shared by both baselines.
struct BellStage {
    projectors: ProjectorSet,
    table: CorrectionTable,
}

impl BellStage {
    fn new() -> Self {
        Self { projectors: bell_projectors(), table: CorrectionTable::default() }
    }

    fn record(&self, outcome: usize, probability: f64, post: Option<&StateVector>) -> TeleportationRecord {
        let bob = post.map(|s| {
            extract_subsystem(s, &BELL_PAIR, &self.projectors.projectors()[outcome][0])
                .expect("Bell outcome leaves Bob factorized")
        });
        TeleportationRecord::new(&self.table, OutcomeLabel::BELL[outcome], probability, bob)
    }

    fn run(&self, state: &StateVector, prior: f64, randomness: &mut RandomSource) -> TeleportationRecord {
        let out = measure_projective(state, &self.projectors, randomness).expect("complete projector set");
        self.record(out.outcome_index, prior * out.probability, Some(&out.post_state))
    }

    fn enumerate(&self, state: Option<&StateVector>, prior: f64, out: &mut Vec<TeleportationRecord>) {
        match state {
            Some(state) => {
                for b in projective_branches(state, &self.projectors).expect("complete projector set") {
                    out.push(self.record(b.outcome_index, prior * b.probability, b.post_state.as_ref()));
                }
            }
            None => out.extend((0..4).map(|k| self.record(k, 0.0, None))),
        }
    }
}

/// Standard teleportation with a maximally entangled channel.
pub struct Bbcjpw {
    stage: BellStage,
    channel: ChannelSpec,
}

impl Default for Bbcjpw {
    fn default() -> Self {
        Self::new()
    }
}

impl Bbcjpw {
    pub fn new() -> Self {
        Self { stage: BellStage::new(), channel: ChannelSpec::maximally_entangled() }
    }

    fn joint(&self, input: &InputQubit) -> StateVector {
        tensor_product(&input.state(), &self.channel.pair_state())
    }
}

impl Teleporter for Bbcjpw {
    fn run(&self, input: &InputQubit, randomness: &mut RandomSource) -> TeleportationRecord {
        self.stage.run(&self.joint(input), 1.0, randomness)
    }

    fn enumerate(&self, input: &InputQubit) -> Vec<TeleportationRecord> {
        let mut out = Vec::with_capacity(4);
        self.stage.enumerate(Some(&self.joint(input)), 1.0, &mut out);
        out
    }
}

pub fn run_bbcjpw(input: &InputQubit, randomness: &mut RandomSource) -> TeleportationRecord {
    Bbcjpw::new().run(input, randomness)
}

/// Conclusive teleportation by filtering: Alice applies
/// `{M_succ = diag(β/α, 1), M_fail}` to her half of the channel; on success
/// the pair is maximally entangled and standard teleportation follows.
pub struct MorHorodecki {
    channel: ChannelSpec,
    filter: Povm,
    stage: BellStage,
    table: CorrectionTable,
}

impl MorHorodecki {
    pub fn new(channel: ChannelSpec) -> Self {
        let ratio = channel.beta_sq() / channel.alpha_sq();
        let accept = Mat2::from_real([[ratio, 0.0], [0.0, 1.0]]);
        let reject = Mat2::from_real([[1.0 - ratio, 0.0], [0.0, 0.0]]);
        let filter = Povm::new(vec![accept, reject], vec![EffectLabel::Accept, EffectLabel::Reject])
            .expect("filter effects are diagonal and complete");
        Self { channel, filter, stage: BellStage::new(), table: CorrectionTable::default() }
    }

    pub fn filter(&self) -> &Povm {
        &self.filter
    }

    fn joint(&self, input: &InputQubit) -> StateVector {
        tensor_product(&input.state(), &self.channel.pair_state())
    }

    fn reject_record(&self, probability: f64, post: Option<&StateVector>) -> TeleportationRecord {
        let bob = post.map(|s| dominant_factor(s, &BELL_PAIR).expect("three-qubit state").1);
        TeleportationRecord::new(&self.table, OutcomeLabel::FilterFail, probability, bob)
    }

    /// Probability that the filter succeeds on the bare channel.
    pub fn filter_success_probability(&self) -> f64 {
        let e = self.filter.effect_for(EffectLabel::Accept).expect("accept effect");
        let pair = self.channel.pair_state();
        // ⟨ψ|E ⊗ I|ψ⟩ with ψ = α|00⟩ + β|11⟩
        let amps = pair.amplitudes();
        let mut total = 0.0;
        for bob in 0..2 {
            let v = [amps[bob], amps[2 + bob]];
            total += e.expectation(v);
        }
        total
    }
}

impl Teleporter for MorHorodecki {
    fn run(&self, input: &InputQubit, randomness: &mut RandomSource) -> TeleportationRecord {
        let filtered = apply_povm(&self.joint(input), &self.filter, ALICE_HALF, randomness).expect("valid filter");
        match self.filter.labels()[filtered.outcome_index] {
            EffectLabel::Accept => self.stage.run(&filtered.post_state, filtered.probability, randomness),
            _ => self.reject_record(filtered.probability, Some(&filtered.post_state)),
        }
    }

    fn enumerate(&self, input: &InputQubit) -> Vec<TeleportationRecord> {
        let mut out = Vec::with_capacity(5);
        for b in povm_branches(&self.joint(input), &self.filter, ALICE_HALF).expect("valid filter") {
            match self.filter.labels()[b.outcome_index] {
                EffectLabel::Accept => self.stage.enumerate(b.post_state.as_ref(), b.probability, &mut out),
                _ => out.push(self.reject_record(b.probability, b.post_state.as_ref())),
            }
        }
        out
    }
}

pub fn run_mor_horodecki(input: &InputQubit, channel: &ChannelSpec, randomness: &mut RandomSource) -> TeleportationRecord {
    MorHorodecki::new(*channel).run(input, randomness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::success_probability;
    use num_complex::Complex64;

    fn input() -> InputQubit {
        InputQubit::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap()
    }

    #[test]
    fn bbcjpw_is_uniform_and_perfect() {
        let tree = Bbcjpw::new().enumerate(&input());
        assert_eq!(tree.len(), 4);
        for r in &tree {
            assert!((r.branch_probability - 0.25).abs() < 1e-15);
            assert!(r.success);
            assert!((r.fidelity_with(&input()).unwrap() - 1.0).abs() < 1e-12);
        }
        let r = run_bbcjpw(&input(), &mut RandomSource::seeded(2));
        assert!(r.success && (r.fidelity_with(&input()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn filter_success_is_two_beta_sq() {
        let ch = ChannelSpec::from_alpha_sq(0.8).unwrap();
        let mh = MorHorodecki::new(ch);
        // α²·(β²/α²) + β²·1
        assert!((mh.filter_success_probability() - 0.4).abs() < 1e-15);
        assert!((success_probability(&mh.enumerate(&input())) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn filtered_channel_is_maximally_entangled() {
        let ch = ChannelSpec::from_alpha_sq(0.9).unwrap();
        let mh = MorHorodecki::new(ch);
        let branches = povm_branches(&ch.pair_state(), mh.filter(), QubitLabel(0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
        let passed = branches[0].post_state.as_ref().unwrap();
        assert!(passed.max_abs_diff(&bell).unwrap() < 1e-12);
    }

    #[test]
    fn mor_horodecki_success_has_unit_fidelity() {
        let ch = ChannelSpec::from_alpha_sq(0.7).unwrap();
        for r in MorHorodecki::new(ch).enumerate(&input()).iter().filter(|r| r.success) {
            assert!((r.fidelity_with(&input()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mor_horodecki_symmetric_always_succeeds() {
        let mut rng = RandomSource::seeded(4);
        for _ in 0..100 {
            assert!(run_mor_horodecki(&input(), &ChannelSpec::maximally_entangled(), &mut rng).success);
        }
    }
}
