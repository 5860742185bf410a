use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature grid with {nodes} nodes is too coarse for degree {degree} (need at least {required})")]
    GridTooCoarse {
        nodes: usize,
        degree: String,
        required: String,
    },

    #[error("quadrature did not converge to relative tolerance {tolerance:e} within {max_nodes} nodes")]
    QuadratureNotConverged { tolerance: f64, max_nodes: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("coefficient vector has {len} entries but the decomposition has {pieces} pieces")]
    TooManyCoefficients { len: usize, pieces: usize },

    #[error("coefficient {index} has |a| = {value} > 1")]
    CoefficientOutOfRange { index: usize, value: f64 },

    #[error("empty witness list")]
    EmptyWitnessList,

    #[error("witness {0} is the zero matrix")]
    ZeroWitness(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("search cap of {cap} candidates exceeded while {context}")]
    SearchCapExceeded { cap: u64, context: String },

    #[error("decomposition horizon exhausted: {0}")]
    HorizonExhausted(String),

    #[error("construction invariant violated at level {level}: {detail}")]
    InvariantViolated { level: usize, detail: String },

    #[error("transfer inequality violated at d = {d}: |A - B| = {gap:e} exceeds slack {slack:e} + tolerance {tolerance:e}")]
    TransferViolated {
        d: usize,
        gap: f64,
        slack: f64,
        tolerance: f64,
    },

    #[error("state has {levels} constructed indices, certificate at d = {d} needs {d}")]
    NotEnoughLevels { levels: usize, d: usize },

    #[error("malformed decomposition document: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
