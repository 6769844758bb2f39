use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    InvalidTarget { index: usize, n_qubits: usize },
    #[error("gate {kind} expects {expected}, got {got}")]
    ArityMismatch {
        kind: String,
        expected: String,
        got: String,
    },
    #[error("scale factor {0} is below 1")]
    ScaleOutOfRange(f64),
    #[error("{n_qubits} qubits exceeds the {backend} cap of {cap}")]
    CapExceeded {
        backend: &'static str,
        n_qubits: usize,
        cap: usize,
    },
    #[error("noise profile covers {profile} qubits, circuit needs {circuit}")]
    IncompatibleProfile { profile: usize, circuit: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("extrapolation needs at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("calibration corpus has {got} circuits, need at least {needed}")]
    CorpusTooSmall { needed: usize, got: usize },
    #[error("mitigation model used before training")]
    NotTrained,
    #[error("ensemble needs at least 2 members, got {0}")]
    InsufficientMembers(usize),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid interval: lower {lo} > upper {hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("statistical test needs at least {needed} values per group")]
    TooFewSamples { needed: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("ideal value {0} cannot anchor a percentage change")]
    DivisionByZero(f64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
