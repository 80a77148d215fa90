use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Interaction or configuration data is missing or inconsistent.
    #[error("data error: {0}")]
    Data(String),
    /// The request exceeds a configured size cap.
    #[error("resource limit: {0}")]
    Resource(String),
    /// An iterative solver gave up before reaching its tolerance.
    #[error("no convergence after {iterations} iterations (best residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },
    /// Non-finite values or a collapsed step size.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A configuration file could not be read or validated.
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
