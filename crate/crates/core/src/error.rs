use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("requested level {requested} exceeds tree depth {depth}")]
    DepthExceeded { requested: usize, depth: usize },
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error("epsilon {epsilon} outside the admissible range (0, {bound})")]
    EpsilonTooLarge { epsilon: f64, bound: f64 },
    #[error("x = {0} is not in the type space")]
    XOutsideT(f64),
    #[error("grid step {step} leaves only {nodes} nodes on a component (need 16)")]
    StepTooCoarse { step: f64, nodes: usize },
    #[error(
        "power iteration did not converge in {iterations} iterations (last change {change:e})"
    )]
    NoConvergence { iterations: usize, change: f64 },
    #[error("kernel matrix is reducible: {0}")]
    ReducibleKernel(String),
    #[error("no power of the kernel matrix up to 64 is entrywise positive")]
    NotPositiveBy64,
    #[error("K = {k} too large: need 0 < K < 1/8 and [-K, K] inside the type space")]
    KTooLarge { k: f64 },
    #[error("subdivision level {0} overflows the interval count")]
    Overflow(usize),
    #[error("missing data for rendering: {0}")]
    MissingData(String),
}
