use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("pole: {what} (distance {distance:.3e})")]
    Pole { what: String, distance: f64 },
    #[error("regime error: {0}")]
    Regime(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) => 3,
            _ => 2,
        }
    }
}
