//! Projective measurements over arbitrary orthogonal projector sets and the
//! optimal unambiguous discrimination POVM for two pure qubit states.

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::random::RandomSource;
use crate::statevec::{QubitLabel, Split, StateVector, EXACT_TOL};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Outcome probabilities must add up to one within this tolerance.
pub const PROBABILITY_SUM_TOL: f64 = 1e-10;

/// Branches with less probability than this carry no post-measurement state.
pub const PROBABILITY_FLOOR: f64 = 1e-20;

/// Ordered projectors on a subsystem, each given by an orthonormal basis of
/// its range.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    subsystem: Vec<QubitLabel>,
    projectors: Vec<Vec<StateVector>>,
}

impl ProjectorSet {
    pub fn new(subsystem: Vec<QubitLabel>, projectors: Vec<Vec<StateVector>>) -> Result<Self> {
        let k = subsystem.len();
        let all: Vec<&StateVector> = projectors.iter().flatten().collect();
        if let Some(v) = all.iter().find(|v| v.num_qubits() != k) {
            return Err(Error::InvalidProjectorSet(format!(
                "basis vector on {} qubits for a {k}-qubit subsystem",
                v.num_qubits()
            )));
        }
        if projectors.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidProjectorSet("empty projector".into()));
        }
        if all.len() != 1 << k {
            return Err(Error::InvalidProjectorSet(format!("ranks sum to {}, expected {}", all.len(), 1 << k)));
        }
        for (i, u) in all.iter().enumerate() {
            for v in &all[i + 1..] {
                let overlap = u.inner(v)?.norm();
                if overlap > EXACT_TOL {
                    return Err(Error::InvalidProjectorSet(format!("basis vectors overlap by {overlap:e}")));
                }
            }
        }
        Ok(Self { subsystem, projectors })
    }

    /// Measurement of each listed qubit in the computational basis jointly.
    pub fn computational(subsystem: Vec<QubitLabel>) -> Self {
        let k = subsystem.len();
        let projectors = (0..1 << k).map(|i| vec![StateVector::basis(k, i)]).collect();
        Self { subsystem, projectors }
    }

    pub fn subsystem(&self) -> &[QubitLabel] {
        &self.subsystem
    }

    pub fn projectors(&self) -> &[Vec<StateVector>] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(Vec::len).collect()
    }

    /// Dense row-major matrix of projector `i` on the subsystem.
    pub fn operator(&self, i: usize) -> Vec<Complex64> {
        let dim = 1 << self.subsystem.len();
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for v in &self.projectors[i] {
            let a = v.amplitudes();
            for r in 0..dim {
                for c in 0..dim {
                    m[r * dim + c] += a[r] * a[c].conj();
                }
            }
        }
        m
    }

    /// Max entry of `Σ P_i − I`.
    pub fn completeness_residual(&self) -> f64 {
        let dim = 1 << self.subsystem.len();
        let mut sum = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..self.len() {
            for (s, p) in sum.iter_mut().zip(self.operator(i)) {
                *s += p;
            }
        }
        (0..dim * dim)
            .map(|idx| {
                let id = if idx / dim == idx % dim { 1.0 } else { 0.0 };
                (sum[idx] - id).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// What a POVM effect reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectLabel {
    IdentifyPlus,
    IdentifyMinus,
    Inconclusive,
    /// Filtering succeeded.
    Accept,
    /// Filtering failed.
    Reject,
    /// Unlabelled effect, by position.
    Index(usize),
}

/// Completeness and positivity diagnostics for a set of effects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmReport {
    pub completeness_residual: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
}

impl PovmReport {
    pub fn is_valid(&self) -> bool {
        self.completeness_residual <= EXACT_TOL && self.min_eigenvalue >= -EXACT_TOL && self.hermiticity_defect <= EXACT_TOL
    }
}

/// Report the completeness residual (max entry of `Σ E − I`) and the
/// smallest eigenvalue over all effects. Never fails.
pub fn validate_povm(effects: &[Mat2]) -> PovmReport {
    let sum = effects.iter().fold(Mat2::zero(), |acc, e| acc + *e);
    let min_eigenvalue = effects.iter().map(|e| e.hermitian_eigen().0[0]).fold(f64::INFINITY, f64::min);
    PovmReport {
        completeness_residual: (sum - Mat2::identity()).max_abs(),
        min_eigenvalue,
        hermiticity_defect: effects.iter().map(Mat2::hermiticity_defect).fold(0.0, f64::max),
    }
}

/// A single-qubit POVM with a measurement operator per effect. The
/// measurement operator is the positive square root of the effect.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<Mat2>,
    kraus: Vec<Mat2>,
    labels: Vec<EffectLabel>,
}

impl Povm {
    pub fn new(effects: Vec<Mat2>, labels: Vec<EffectLabel>) -> Result<Self> {
        if effects.is_empty() || effects.len() != labels.len() {
            return Err(Error::InvalidPovm(format!("{} effects but {} labels", effects.len(), labels.len())));
        }
        let report = validate_povm(&effects);
        if !report.is_valid() {
            return Err(Error::InvalidPovm(format!(
                "completeness residual {:e}, min eigenvalue {:e}",
                report.completeness_residual, report.min_eigenvalue
            )));
        }
        let kraus = effects.iter().map(Mat2::psd_sqrt).collect();
        Ok(Self { effects, kraus, labels })
    }

    /// Single-effect POVM `{I}`.
    pub fn trivial() -> Self {
        Self { effects: vec![Mat2::identity()], kraus: vec![Mat2::identity()], labels: vec![EffectLabel::Index(0)] }
    }

    /// Projective measurement onto an orthonormal qubit basis.
    pub fn projective(basis: [&StateVector; 2]) -> Result<Self> {
        let effects = basis
            .iter()
            .map(|v| {
                if v.num_qubits() != 1 {
                    return Err(Error::DimensionMismatch { left: 1, right: v.num_qubits() });
                }
                let a = [v.amplitude(0), v.amplitude(1)];
                Ok(Mat2::outer(a, a))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(effects, vec![EffectLabel::Index(0), EffectLabel::Index(1)])
    }

    pub fn effects(&self) -> &[Mat2] {
        &self.effects
    }

    pub fn measurement_operators(&self) -> &[Mat2] {
        &self.kraus
    }

    pub fn labels(&self) -> &[EffectLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn validation(&self) -> PovmReport {
        validate_povm(&self.effects)
    }

    pub fn effect_for(&self, label: EffectLabel) -> Option<&Mat2> {
        self.labels.iter().position(|&l| l == label).map(|i| &self.effects[i])
    }

    /// Probability that the POVM returns a definite identification on a
    /// single-qubit state.
    pub fn conclusive_probability(&self, state: &StateVector) -> f64 {
        let v = [state.amplitude(0), state.amplitude(1)];
        self.effects
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| matches!(l, EffectLabel::IdentifyPlus | EffectLabel::IdentifyMinus))
            .map(|(e, _)| e.expectation(v))
            .sum()
    }
}

/// Optimal equal-prior unambiguous discrimination of two pure qubit states.
///
/// `E₊` is proportional to the projector orthogonal to `u_minus` and `E₋` to
/// the projector orthogonal to `u_plus`, both scaled by `1/(1+s)` with
/// `s = |⟨u₊|u₋⟩|`; the rest goes to the inconclusive effect. Identical
/// states give the degenerate POVM `{0, 0, I}`.
pub fn build_idp_povm(u_plus: &StateVector, u_minus: &StateVector) -> Result<Povm> {
    for u in [u_plus, u_minus] {
        if u.num_qubits() != 1 {
            return Err(Error::DimensionMismatch { left: 1, right: u.num_qubits() });
        }
    }
    let labels = vec![EffectLabel::IdentifyPlus, EffectLabel::IdentifyMinus, EffectLabel::Inconclusive];
    let overlap = u_plus.inner(u_minus)?.norm();
    if 1.0 - overlap < EXACT_TOL {
        return Povm::new(vec![Mat2::zero(), Mat2::zero(), Mat2::identity()], labels);
    }
    let perp = |u: &StateVector| [-u.amplitude(1).conj(), u.amplitude(0).conj()];
    let scale = 1.0 / (1.0 + overlap);
    let plus_perp = perp(u_plus);
    let minus_perp = perp(u_minus);
    let e_plus = Mat2::outer(minus_perp, minus_perp).scale(scale);
    let e_minus = Mat2::outer(plus_perp, plus_perp).scale(scale);
    let e_fail = (Mat2::identity() - e_plus - e_minus).clamp_psd();
    Povm::new(vec![e_plus, e_minus, e_fail], labels)
}

/// One selected (or enumerated) measurement result.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub outcome_index: usize,
    pub probability: f64,
    pub post_state: StateVector,
}

/// Every result of a measurement with its exact probability. The
/// conditional state is absent for branches below [`PROBABILITY_FLOOR`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBranch {
    pub outcome_index: usize,
    pub probability: f64,
    pub post_state: Option<StateVector>,
}

fn check_total(probabilities: impl Iterator<Item = f64>) -> Result<()> {
    let total: f64 = probabilities.sum();
    if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(Error::ProbabilitySum { total });
    }
    Ok(())
}

fn branch(outcome_index: usize, raw: Vec<Complex64>) -> Result<MeasurementBranch> {
    let probability: f64 = raw.iter().map(|z| z.norm_sqr()).sum();
    let post_state = if probability > PROBABILITY_FLOOR { Some(StateVector::normalized(raw)?) } else { None };
    Ok(MeasurementBranch { outcome_index, probability, post_state })
}

fn sample(branches: Vec<MeasurementBranch>, randomness: &mut RandomSource) -> MeasurementOutcome {
    let probs: Vec<f64> = branches.iter().map(|b| if b.post_state.is_some() { b.probability } else { 0.0 }).collect();
    let chosen = randomness.choose_index(&probs);
    let b = branches.into_iter().nth(chosen).expect("choose_index stays in range");
    MeasurementOutcome {
        outcome_index: b.outcome_index,
        probability: b.probability,
        post_state: b.post_state.expect("a branch with positive probability has a post state"),
    }
}

/// `P_i |ψ⟩` as raw amplitudes.
fn project(state: &StateVector, split: &Split, basis: &[StateVector]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    for b in basis {
        let r = split.contract(state.amplitudes(), b.amplitudes());
        split.embed_into(&mut out, b.amplitudes(), &r);
    }
    out
}

fn check_subsystem(state: &StateVector, projectors: &ProjectorSet) -> Result<Split> {
    Split::new(state.num_qubits(), projectors.subsystem())
}

/// Exact Born probabilities `⟨ψ|P_i|ψ⟩` for every projector.
pub fn born_probabilities(state: &StateVector, projectors: &ProjectorSet) -> Result<Vec<f64>> {
    let split = check_subsystem(state, projectors)?;
    let probs: Vec<f64> = projectors
        .projectors()
        .iter()
        .map(|basis| {
            basis
                .iter()
                .map(|b| split.contract(state.amplitudes(), b.amplitudes()).iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum()
        })
        .collect();
    check_total(probs.iter().copied())?;
    Ok(probs)
}

/// All outcomes of a projective measurement with normalized post states.
pub fn projective_branches(state: &StateVector, projectors: &ProjectorSet) -> Result<Vec<MeasurementBranch>> {
    let split = check_subsystem(state, projectors)?;
    let branches = projectors
        .projectors()
        .iter()
        .enumerate()
        .map(|(i, basis)| branch(i, project(state, &split, basis)))
        .collect::<Result<Vec<_>>>()?;
    check_total(branches.iter().map(|b| b.probability))?;
    Ok(branches)
}

/// Sample one projective outcome with Born probabilities.
pub fn measure_projective(
    state: &StateVector,
    projectors: &ProjectorSet,
    randomness: &mut RandomSource,
) -> Result<MeasurementOutcome> {
    Ok(sample(projective_branches(state, projectors)?, randomness))
}

/// All outcomes of a POVM applied to one qubit, with post states
/// `M_i|ψ⟩/‖M_i|ψ⟩‖`.
pub fn povm_branches(state: &StateVector, povm: &Povm, target: QubitLabel) -> Result<Vec<MeasurementBranch>> {
    let branches = povm
        .measurement_operators()
        .iter()
        .enumerate()
        .map(|(i, m)| branch(i, state.apply_operator(target, m)?))
        .collect::<Result<Vec<_>>>()?;
    check_total(branches.iter().map(|b| b.probability))?;
    Ok(branches)
}

/// Sample one POVM outcome on `target`.
pub fn apply_povm(
    state: &StateVector,
    povm: &Povm,
    target: QubitLabel,
    randomness: &mut RandomSource,
) -> Result<MeasurementOutcome> {
    Ok(sample(povm_branches(state, povm, target)?, randomness))
}
