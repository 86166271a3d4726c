use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid coupling graph: {0}")]
    InvalidGraph(String),

    #[error("coupling graph is disconnected")]
    Disconnected,

    #[error("executed set is not downward-closed: gate {gate} executed before its predecessor {pred}")]
    NotDownwardClosed { gate: usize, pred: usize },

    #[error("swap ({0}, {1}) is not an edge of the coupling graph")]
    NonEdgeSwap(u32, u32),

    #[error("front layer is empty")]
    EmptyFront,

    #[error("circuit uses {circuit} qubits but the device has only {device}")]
    CircuitTooLarge { circuit: usize, device: usize },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("invalid heuristic configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("fit did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("degenerate fit data: {0}")]
    DegenerateData(String),

    #[error("internal error: {0}")]
    Internal(String),
}
