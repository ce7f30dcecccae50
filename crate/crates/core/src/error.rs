use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("problem too large for exhaustive enumeration: n = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("qubit budget exceeded: {n} qubits (limit {limit})")]
    QubitBudget { n: usize, limit: usize },
    #[error("angle out of bounds: {0}")]
    AngleOutOfBounds(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("unsupported gate for basis rewrite: {0}")]
    UnsupportedGate(String),
    #[error("invalid coupling map: {0}")]
    InvalidCouplingMap(String),
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("start point outside bounds at coordinate {0}")]
    StartOutOfBounds(usize),
    #[error("zero ground energy: relative error undefined")]
    ZeroGroundEnergy,
    #[error("fit did not converge after {0} iterations")]
    FitNonConvergence(usize),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("infeasible dataset spec: {0}")]
    InfeasibleSpec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
