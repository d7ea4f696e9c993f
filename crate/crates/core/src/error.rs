use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("delta-mode components have no pointwise value or frequency integral")]
    DeltaNotEvaluable,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("tolerance not met: error estimate {achieved:.3e} exceeds target {requested:.3e} (estimate {estimate:.6e})")]
    ToleranceNotMet {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("evaluation budget of {0} integrand calls exhausted")]
    BudgetExceeded(usize),

    #[error("computation cancelled")]
    Cancelled,

    #[error("special function failure: {0}")]
    SpecialFunction(String),

    #[error("no certified tail bound is available for {0}")]
    NoTailCertificate(String),

    #[error("Matsubara tail not certifiable: {0}")]
    TailNotCertifiable(String),

    #[error("no truncation order up to {0} reaches the requested error")]
    SearchBudgetExceeded(usize),

    #[error("method not available: {0}")]
    MethodUnavailable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::Domain(_) | Error::DeltaNotEvaluable | Error::MethodUnavailable(_) => 2,
            Error::BudgetExceeded(_) | Error::SearchBudgetExceeded(_) => 4,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
