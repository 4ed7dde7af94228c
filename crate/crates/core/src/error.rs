use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("ill-conditioned moment system: K = {modes}, condition estimate {condition:.3e}")]
    IllConditioned { modes: usize, condition: f64 },

    #[error("degenerate basis at eta = {eta}: no direction survived the cutoff")]
    DegenerateBasis { eta: f64 },

    #[error("sample length {got} does not match {expected} quadrature nodes")]
    Misaligned { expected: usize, got: usize },

    #[error("operands were built on different quadrature rules or cells")]
    Mismatch,

    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("eta = {0} is not a point of the Floquet grid")]
    OffGrid(f64),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
