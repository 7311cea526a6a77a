use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Every variant carries enough context to be printed as a one-line
/// diagnostic by the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DomainError: {0}")]
    Domain(String),
    #[error("ConvergenceError: {0}")]
    Convergence(String),
    #[error("PoleError: {0}")]
    Pole(String),
    #[error("OverflowError: {0}")]
    Overflow(String),
    #[error("RegimeError: {0}")]
    Regime(String),
    #[error("NoRootError: {0}")]
    NoRoot(String),
    #[error("CapExceeded: path not absorbed before t_cap = {t_cap}")]
    CapExceeded { t_cap: f64 },
}

impl Error {
    /// Short machine-readable name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Convergence(_) => "ConvergenceError",
            Error::Pole(_) => "PoleError",
            Error::Overflow(_) => "OverflowError",
            Error::Regime(_) => "RegimeError",
            Error::NoRoot(_) => "NoRootError",
            Error::CapExceeded { .. } => "CapExceeded",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
