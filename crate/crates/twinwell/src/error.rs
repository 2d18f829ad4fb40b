use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug)]
pub enum Error {
    /// An input lies outside the validity domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A grid, step size, or simulation window fails a resolution gate.
    #[error("validation error: {0}")]
    Validation(String),

    /// Configuration file problems, with a 1-based line number when known.
    #[error("config error (line {line}): {msg}")]
    Config { line: usize, msg: String },

    /// A least-squares fit did not converge.
    #[error("fit failed to converge: residual norm {residual}")]
    FitDiverged { residual: f64 },

    /// The quadrature tail estimate is too large to trust the result.
    #[error("quadrature tail correction {tail_fraction:.3e} exceeds {limit:.1e} of the result")]
    TailTooLarge { tail_fraction: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
