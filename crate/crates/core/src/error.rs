use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("signed set {0} is not spherical")]
    NotSpherical(String),
    #[error("the identity has no predecessor")]
    IdentityHasNoPredecessor,
    #[error("element cap exceeded: {limit} elements")]
    CapExceeded { limit: usize },
    #[error("ball built to level {built}, level {needed} required")]
    BallTooShallow { built: usize, needed: usize },
    #[error("cell {0} is ideal")]
    IdealCell(String),
    #[error("at least {needed} levels required, got {got}")]
    TooFewLevels { needed: usize, got: usize },
    #[error("subdivision rule did not stabilize within {levels} levels")]
    RuleUnstable { levels: usize },
    #[error("recurrence fit underdetermined: {0}")]
    FitUnderdetermined(String),
    #[error("malformed cube complex: {0}")]
    MalformedComplex(String),
    #[error("star-convexity violated: {0}")]
    StarConvexity(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
