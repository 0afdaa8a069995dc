use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QrlError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mode index {index} out of range for {len} modes")]
    ModeOutOfRange { index: usize, len: usize },
    #[error("modes {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("grid mismatch: {0} vs {1} points")]
    GridMismatch(usize, usize),
    #[error("state lost domain (marginal mass {0:e})")]
    StateLostDomain(f64),
    #[error("envelope exceeds the grid: half width {required:.3} needed, grid has {available:.3}")]
    EnvelopeTooWide { required: f64, available: f64 },
    #[error("undecodable gadget: sin(theta_a - theta_b) = {0:e}")]
    UndecodableGadget(f64),
    #[error("routing required: gate on wires {0} and {1}")]
    RoutingRequired(usize, usize),
    #[error("wire arity mismatch for {gate}: expected {expected}, got {got}")]
    Arity { gate: String, expected: usize, got: usize },
    #[error("too many qubits: {got} > {max}")]
    TooManyQubits { got: usize, max: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no candidate passes for {gate}: best fidelity {best_fidelity:.4} at {best_program}")]
    Calibration { gate: String, best_fidelity: f64, best_program: String },
    #[error("missing angle program for {0}")]
    MissingProgram(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, QrlError>;
