use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tree depth {0} out of range 1..=16")]
    DepthOutOfRange(usize),
    #[error("invalid code parameters n={n}, k={k}")]
    InvalidCode { n: usize, k: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("noise standard deviation must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("qubit count {0} out of range 1..=24")]
    QubitCountOutOfRange(usize),
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("gate operands are not distinct: {0:?}")]
    DuplicateOperand(Vec<usize>),
    #[error("non-finite gate angle")]
    NonFiniteAngle,
    #[error("state is not normalized (norm² = {0})")]
    Unnormalized(f64),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("bit-flip probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("message length {0} too large to enumerate (limit 20)")]
    EnumerationTooLarge(usize),
    #[error("code has no frozen bits; frozen bit satisfaction is undefined")]
    NoFrozenBits,
    #[error("angle {0} outside the open interval (0, pi/2)")]
    AngleOutOfRange(f64),
    #[error("slow-rotation arccos argument {0} outside [-1, 1]")]
    PhaseOutOfRange(f64),
    #[error("probability vector contradicts every codeword")]
    DegeneratePosterior,
    #[error("circuit text line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
