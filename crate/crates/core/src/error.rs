use thiserror::Error;

/// Errors raised anywhere in the encode / compile / simulate pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("data length {got} does not match capacity {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("data entry {index} = {value} lies outside [-1, 1]")]
    ValueOutOfRange { index: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("register of {n_qubits} qubits exceeds the limit of {limit}")]
    RegisterTooLarge { n_qubits: usize, limit: usize },

    #[error("infeasible pairing: {0}")]
    InfeasiblePairing(String),

    #[error("circuit is not in DPQA-optimized form: {0}")]
    NotDpqaForm(String),

    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),

    #[error("invalid program: {0}")]
    InvalidProgram(String),

    #[error("calibration is degenerate: {0}")]
    DegenerateCalibration(String),

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

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

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
