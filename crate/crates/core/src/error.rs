use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },

    #[error("state is not normalized (squared norm {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("qubit {index} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {0} listed twice")]
    DuplicateQubit(usize),

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("gate is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("state does not factorize over the witnessed subsystem (residual {residual:e})")]
    NotFactorizable { residual: f64 },

    #[error("invalid projector set: {0}")]
    InvalidProjectorSet(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("outcome probabilities sum to {total}, expected 1")]
    ProbabilitySum { total: f64 },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid input qubit: {0}")]
    InvalidInput(String),

    #[error("alpha_sq must lie in [0.5, 1] (got {0})")]
    AlphaSqOutOfRange(f64),

    #[error("unknown protocol `{0}` (expected qubit-assisted, bbcjpw or mor-horodecki)")]
    UnknownProtocol(String),

    #[error("n_trials must be at least 1")]
    NoTrials,
}
