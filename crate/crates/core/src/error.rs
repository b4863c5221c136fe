use thiserror::Error;

/// Errors raised by model construction, evaluation and the exact solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bit vector has length {got}, instance has {expected} variables")]
    Dimension { expected: usize, got: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("{vars} variables exceed the enumeration cap of {cap}")]
    EnumerationLimit { vars: usize, cap: usize },

    #[error("no request has both working and protection lightpaths, so M is undefined")]
    UndefinedM,

    #[error("variable index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot place {links} links on {nodes} nodes as a simple symmetric graph")]
    InfeasibleDensity { nodes: usize, links: usize },

    #[error("could not find {wanted} routable source/destination pairs, only {found} exist")]
    NotEnoughPairs { wanted: usize, found: usize },

    #[error("malformed bit string: {0}")]
    BitString(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
