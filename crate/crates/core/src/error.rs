use alloc::string::String;

/// Errors reported by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "N + 1 = {nodes} nodes is too few for m = {m}: the formula exists only when N + 1 >= m"
    )]
    TooFewNodes { m: usize, nodes: usize },

    #[error("unsupported smoothness order m = {0} (supported: 1..=6)")]
    UnsupportedOrder(usize),

    #[error("singular linear system in {0}")]
    Singular(&'static str),

    #[error(
        "ill-conditioned system in {context}: relative residual {residual:e} exceeds {limit:e}"
    )]
    IllConditioned {
        context: &'static str,
        residual: f64,
        limit: f64,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("geometry mismatch: {0}")]
    Geometry(String),
}

impl Error {
    /// True for errors caused by bad input rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::TooFewNodes { .. }
                | Error::UnsupportedOrder(_)
                | Error::LengthMismatch { .. }
                | Error::Geometry(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
