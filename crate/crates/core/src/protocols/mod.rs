//! Teleportation protocols over a pure, possibly non-maximally entangled
//! channel `α|00⟩ + β|11⟩`.
//!
//! Three protocols share the same record type:
//!
//! * [`QubitAssisted`]: Alice adds an ancilla `α|0⟩ + β|1⟩`, measures her
//!   three qubits against six projectors and, on the two rank-2 results,
//!   finishes with an unambiguous discrimination POVM.
//! * [`Bbcjpw`]: standard teleportation over a maximally entangled pair.
//! * [`MorHorodecki`]: Alice first filters her channel half towards a
//!   maximally entangled pair, then teleports normally.
//!
//! Every protocol can be sampled (`run`) or enumerated exhaustively
//! (`enumerate`), which yields every branch with its exact probability.

mod baselines;
mod qubit_assisted;

pub use baselines::{run_bbcjpw, run_mor_horodecki, Bbcjpw, MorHorodecki};
pub use qubit_assisted::{
    build_phi_basis, build_projectors, enumerate_branches, prepare_joint_state, regrouped_joint_state,
    run_qubit_assisted, PhiBasis, QubitAssisted,
};

use crate::error::{Error, Result};
use crate::random::RandomSource;
use crate::statevec::{apply_gate, QubitLabel, SingleQubitGate, StateVector, EXACT_TOL};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Alice's input qubit.
pub const INPUT: QubitLabel = QubitLabel(0);

/// Schmidt coefficients of the shared channel `α|00⟩ + β|11⟩`, with
/// `α ≥ β ≥ 0` and `α² + β² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    alpha: f64,
    beta: f64,
    alpha_sq: f64,
    beta_sq: f64,
}

impl ChannelSpec {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || beta < 0.0 || alpha < beta {
            return Err(Error::InvalidChannel(format!("need alpha >= beta >= 0, got ({alpha}, {beta})")));
        }
        let norm = alpha * alpha + beta * beta;
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidChannel(format!("alpha^2 + beta^2 = {norm}")));
        }
        Ok(Self { alpha, beta, alpha_sq: alpha * alpha, beta_sq: beta * beta })
    }

    /// Channel with the given `α²` in `[1/2, 1]`.
    pub fn from_alpha_sq(alpha_sq: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&alpha_sq) {
            return Err(Error::AlphaSqOutOfRange(alpha_sq));
        }
        let beta_sq = 1.0 - alpha_sq;
        Ok(Self { alpha_sq, beta_sq, ..Self::new(alpha_sq.sqrt(), beta_sq.sqrt())? })
    }

    pub fn maximally_entangled() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { alpha: h, beta: h, alpha_sq: 0.5, beta_sq: 0.5 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha_sq
    }

    pub fn beta_sq(&self) -> f64 {
        self.beta_sq
    }

    /// `α|00⟩ + β|11⟩`
    pub fn pair_state(&self) -> StateVector {
        StateVector::from_real(&[self.alpha, 0.0, 0.0, self.beta]).expect("channel is normalized")
    }

    /// `α|0⟩ + β|1⟩`, the ancilla Alice prepares.
    pub fn ancilla_state(&self) -> StateVector {
        StateVector::from_real(&[self.alpha, self.beta]).expect("channel is normalized")
    }
}

/// The unknown qubit `a|0⟩ + b|1⟩` Alice sends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputQubit {
    pub a: Complex64,
    pub b: Complex64,
}

impl InputQubit {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidInput(format!("|a|^2 + |b|^2 = {n}")));
        }
        Ok(Self { a, b })
    }

    pub fn real(a: f64, b: f64) -> Result<Self> {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn state(&self) -> StateVector {
        StateVector::qubit(self.a, self.b).expect("input is normalized")
    }
}

/// Which branch of a protocol a run ended in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeLabel {
    Phi5,
    Phi6,
    Phi7,
    Phi8,
    Subspace1Plus,
    Subspace1Minus,
    Subspace1Fail,
    Subspace2Plus,
    Subspace2Minus,
    Subspace2Fail,
    BellPhiPlus,
    BellPhiMinus,
    BellPsiPlus,
    BellPsiMinus,
    FilterFail,
}

impl OutcomeLabel {
    /// The ten branches of the qubit-assisted protocol, in tree order.
    pub const QUBIT_ASSISTED: [OutcomeLabel; 10] = [
        OutcomeLabel::Phi5,
        OutcomeLabel::Phi6,
        OutcomeLabel::Phi7,
        OutcomeLabel::Phi8,
        OutcomeLabel::Subspace1Plus,
        OutcomeLabel::Subspace1Minus,
        OutcomeLabel::Subspace1Fail,
        OutcomeLabel::Subspace2Plus,
        OutcomeLabel::Subspace2Minus,
        OutcomeLabel::Subspace2Fail,
    ];

    pub const BELL: [OutcomeLabel; 4] =
        [OutcomeLabel::BellPhiPlus, OutcomeLabel::BellPhiMinus, OutcomeLabel::BellPsiPlus, OutcomeLabel::BellPsiMinus];

    pub fn as_str(&self) -> &'static str {
        match self {
            OutcomeLabel::Phi5 => "phi5",
            OutcomeLabel::Phi6 => "phi6",
            OutcomeLabel::Phi7 => "phi7",
            OutcomeLabel::Phi8 => "phi8",
            OutcomeLabel::Subspace1Plus => "subspace1_plus",
            OutcomeLabel::Subspace1Minus => "subspace1_minus",
            OutcomeLabel::Subspace1Fail => "subspace1_fail",
            OutcomeLabel::Subspace2Plus => "subspace2_plus",
            OutcomeLabel::Subspace2Minus => "subspace2_minus",
            OutcomeLabel::Subspace2Fail => "subspace2_fail",
            OutcomeLabel::BellPhiPlus => "bell_phi_plus",
            OutcomeLabel::BellPhiMinus => "bell_phi_minus",
            OutcomeLabel::BellPsiPlus => "bell_psi_plus",
            OutcomeLabel::BellPsiMinus => "bell_psi_minus",
            OutcomeLabel::FilterFail => "filter_fail",
        }
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Bob's local rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    Identity,
    SigmaZ,
    SigmaX,
    SigmaZSigmaX,
}

impl Correction {
    /// Two-bit code: 00 identity, 01 σ_z, 10 σ_x, 11 σ_zσ_x.
    pub fn index(self) -> u8 {
        match self {
            Correction::Identity => 0,
            Correction::SigmaZ => 1,
            Correction::SigmaX => 2,
            Correction::SigmaZSigmaX => 3,
        }
    }

    pub fn from_index(index: u8) -> Option<Self> {
        Some(match index {
            0 => Correction::Identity,
            1 => Correction::SigmaZ,
            2 => Correction::SigmaX,
            3 => Correction::SigmaZSigmaX,
            _ => return None,
        })
    }

    pub fn gate(self) -> SingleQubitGate {
        match self {
            Correction::Identity => SingleQubitGate::identity(),
            Correction::SigmaZ => SingleQubitGate::pauli_z(),
            Correction::SigmaX => SingleQubitGate::pauli_x(),
            Correction::SigmaZSigmaX => SingleQubitGate::pauli_zx(),
        }
    }
}

/// Which rotation Bob applies after each successful outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTable {
    entries: Vec<(OutcomeLabel, Correction)>,
}

impl Default for CorrectionTable {
    fn default() -> Self {
        use Correction::*;
        use OutcomeLabel::*;
        Self {
            entries: vec![
                (Phi5, Identity),
                (Phi6, SigmaZ),
                (Phi7, SigmaX),
                (Phi8, SigmaZSigmaX),
                (Subspace1Plus, Identity),
                (Subspace1Minus, SigmaZ),
                (Subspace2Plus, SigmaX),
                (Subspace2Minus, SigmaZSigmaX),
                (BellPhiPlus, Identity),
                (BellPhiMinus, SigmaZ),
                (BellPsiPlus, SigmaX),
                (BellPsiMinus, SigmaZSigmaX),
            ],
        }
    }
}

impl CorrectionTable {
    /// `None` for failure outcomes.
    pub fn lookup(&self, label: OutcomeLabel) -> Option<Correction> {
        self.entries.iter().find(|(l, _)| *l == label).map(|&(_, c)| c)
    }

    pub fn entries(&self) -> &[(OutcomeLabel, Correction)] {
        &self.entries
    }
}

/// Alice's three-bit announcement: a success flag plus two correction bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassicalMessage {
    pub success: bool,
    pub correction_bits: u8,
}

impl ClassicalMessage {
    /// Bit 0 is the success flag, bits 1–2 the correction code.
    pub fn to_bits(self) -> u8 {
        u8::from(self.success) | (self.correction_bits & 0b11) << 1
    }

    pub fn from_bits(bits: u8) -> Self {
        Self { success: bits & 1 == 1, correction_bits: (bits >> 1) & 0b11 }
    }

    pub fn correction(self) -> Correction {
        Correction::from_index(self.correction_bits).expect("two bits")
    }
}

impl fmt::Display for ClassicalMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:02b})", u8::from(self.success), self.correction_bits)
    }
}

/// One protocol run, or one branch of the exhaustive outcome tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportationRecord {
    pub outcome_label: OutcomeLabel,
    pub classical_bits: ClassicalMessage,
    pub correction: Correction,
    pub success: bool,
    /// Bob's qubit after any correction. Absent only for enumerated
    /// branches whose probability is too small to condition on.
    pub bob_state: Option<StateVector>,
    /// Probability of this branch of the outcome tree.
    pub branch_probability: f64,
}

impl TeleportationRecord {
    /// Build a record for `label`, correcting Bob's state through the table.
    pub(crate) fn new(table: &CorrectionTable, label: OutcomeLabel, branch_probability: f64, bob: Option<StateVector>) -> Self {
        let found = table.lookup(label);
        let correction = found.unwrap_or(Correction::Identity);
        let bob_state = bob.map(|s| apply_gate(&s, QubitLabel(0), &correction.gate()).expect("single-qubit Bob state"));
        let success = found.is_some();
        Self {
            outcome_label: label,
            classical_bits: ClassicalMessage { success, correction_bits: if success { correction.index() } else { 0 } },
            correction,
            success,
            bob_state,
            branch_probability,
        }
    }

    /// Fidelity of Bob's final qubit with the input, when Bob has a state.
    pub fn fidelity_with(&self, input: &InputQubit) -> Option<f64> {
        self.bob_state.as_ref().map(|s| crate::statevec::fidelity(s, &input.state()).expect("both single-qubit"))
    }
}

/// Alice's classical message for a finished run.
pub fn encode_classical_message(record: &TeleportationRecord) -> ClassicalMessage {
    if record.success {
        ClassicalMessage { success: true, correction_bits: record.correction.index() }
    } else {
        ClassicalMessage { success: false, correction_bits: 0 }
    }
}

/// A protocol instantiated for a fixed channel.
pub trait Teleporter: Send + Sync {
    fn run(&self, input: &InputQubit, randomness: &mut RandomSource) -> TeleportationRecord;
    fn enumerate(&self, input: &InputQubit) -> Vec<TeleportationRecord>;
}

/// Protocol selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    QubitAssisted,
    Bbcjpw,
    MorHorodecki,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::QubitAssisted, Protocol::Bbcjpw, Protocol::MorHorodecki];

    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::QubitAssisted => "qubit-assisted",
            Protocol::Bbcjpw => "bbcjpw",
            Protocol::MorHorodecki => "mor-horodecki",
        }
    }

    /// Instantiate for a channel. BBCJPW ignores it and always uses the
    /// maximally entangled pair.
    pub fn prepare(self, channel: ChannelSpec) -> Box<dyn Teleporter> {
        match self {
            Protocol::QubitAssisted => Box::new(QubitAssisted::new(channel)),
            Protocol::Bbcjpw => Box::new(Bbcjpw::new()),
            Protocol::MorHorodecki => Box::new(MorHorodecki::new(channel)),
        }
    }

    /// The channel the protocol actually consumes.
    pub fn effective_channel(self, channel: ChannelSpec) -> ChannelSpec {
        match self {
            Protocol::Bbcjpw => ChannelSpec::maximally_entangled(),
            _ => channel,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| Error::UnknownProtocol(s.to_string()))
    }
}

/// Sum of branch probabilities over successful branches.
pub fn success_probability(branches: &[TeleportationRecord]) -> f64 {
    branches.iter().filter(|r| r.success).map(|r| r.branch_probability).sum()
}
