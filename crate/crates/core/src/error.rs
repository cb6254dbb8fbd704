//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {got} outside supported range 1..={max}")]
    QubitCountOutOfRange { got: usize, max: usize },

    #[error("qubit index {q} out of range for {num_qubits}-qubit register")]
    QubitIndexOutOfRange { q: usize, num_qubits: usize },

    #[error("qubit indices must be distinct, got {q} twice")]
    DuplicateQubit { q: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected {expected} parameters, got {got}")]
    ParamCountMismatch { expected: usize, got: usize },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("matrix is not unitary within tolerance")]
    NonUnitary,

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(&'static str),

    #[error("Bloch vector norm {norm} exceeds 1")]
    BlochNormOutOfRange { norm: f64 },

    #[error("rotation generator must not be the identity string")]
    IdentityGenerator,

    #[error("Pauli string length {0} unsupported (expected 1 or 2)")]
    PauliStringLength(usize),

    #[error("circuit parameter indices must cover the parameter range exactly once")]
    ParamIndexCoverage,

    #[error("prior probabilities must be non-negative and sum to 1, got ({t}, {g})")]
    InvalidPriors { t: f64, g: f64 },

    #[error("operation requires equal prior probabilities")]
    UnequalPriors,

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("{0} is not implemented")]
    NotImplemented(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
