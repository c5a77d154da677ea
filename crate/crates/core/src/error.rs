use thiserror::Error;

/// Errors raised by the estimation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("overlapping groups: column {index} appears in more than one group")]
    Overlap { index: usize },

    #[error("groups do not cover the index set: {0}")]
    Coverage(String),

    #[error("group {group} is empty")]
    EmptyGroup { group: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("task shapes disagree: {0}")]
    ShapeMismatch(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("Gram diagonal is not constant (entries range over [{min}, {max}])")]
    NonConstantDiagonal { min: f64, max: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("every sampled direction had a zero support block")]
    Degenerate,

    #[error("{subsets} subsets exceed the enumeration limit of {limit}; use the sampled RE estimate instead")]
    CombinatorialBlowup { subsets: u128, limit: u128 },

    #[error("solver did not converge after {iterations} iterations (KKT residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Overlap { .. } => "overlap",
            Error::Coverage(_) => "coverage",
            Error::EmptyGroup { .. } => "empty_group",
            Error::Dimension(_) => "dimension",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::Domain(_) => "domain",
            Error::NonConstantDiagonal { .. } => "non_constant_diagonal",
            Error::NonFinite(_) => "non_finite",
            Error::Degenerate => "degenerate",
            Error::CombinatorialBlowup { .. } => "combinatorial_blowup",
            Error::NotConverged { .. } => "not_converged",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
        }
    }

    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_) | Error::NotConverged { .. } | Error::Degenerate
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
