use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("memory budget exceeded: table needs about {needed} bytes, budget is {budget}")]
    ResourceLimit { needed: usize, budget: usize },

    #[error("query ({n}, {m}) outside table bounds maxN={max_n}, maxM={max_m}")]
    OutOfRange {
        n: usize,
        m: usize,
        max_n: usize,
        max_m: usize,
    },

    #[error("empty class: no graph with n={n}, m={m}, k={k} ({reason})")]
    EmptyClass {
        n: usize,
        m: usize,
        k: usize,
        reason: String,
    },

    #[error("malformed graph: {0}")]
    Malformed(String),

    #[error("not a labelled transition matrix: {0}")]
    InvalidMatrix(String),

    #[error("graph too small to decompose: {n} vertices")]
    TooSmall { n: usize },

    #[error("decomposition step inconsistent with graph: {0}")]
    InconsistentStep(String),

    #[error("index out of bounds: {0}")]
    Bounds(String),

    #[error("size {n} exceeds the enumeration cap {max}")]
    SizeLimit { n: usize, max: usize },

    #[error("under-sampled: {total} observations for {classes} classes (need at least {needed})")]
    UnderSampled {
        total: u64,
        classes: usize,
        needed: u64,
    },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
