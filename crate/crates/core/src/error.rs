use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} exceeds the table ceiling {ceiling}")]
    AboveCeiling { value: u64, ceiling: u64 },

    #[error("the {n}-th prime exceeds the table ceiling {ceiling}")]
    IndexAboveCeiling { n: u64, ceiling: u64 },

    /// Raised by iteration: `depth` is the first `j` with `p^(j)_n` above the ceiling.
    #[error("p^({depth})_{n} exceeds the table ceiling {ceiling}")]
    DepthAboveCeiling { n: u64, depth: u32, ceiling: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("empty set: {0}")]
    EmptySet(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for the three ceiling-related variants.
    pub fn is_range(&self) -> bool {
        matches!(
            self,
            Error::AboveCeiling { .. } | Error::IndexAboveCeiling { .. } | Error::DepthAboveCeiling { .. }
        )
    }
}
