use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid harvester curve: {0}")]
    InvalidCurve(String),

    #[error("efficiency fit infeasible: {0}")]
    FitInfeasible(String),

    #[error("nonlinear fit did not converge: {0}")]
    FitDivergence(String),

    #[error("density mass outside the grid: {0}")]
    SupportOverflow(String),

    #[error("FFT size too small for the requested convolution: {0}")]
    Aliasing(String),

    #[error("numerical routine did not converge: {0}")]
    NonConvergence(String),

    #[error("CSV error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by numerical routines rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::FitInfeasible(_)
                | Error::FitDivergence(_)
                | Error::SupportOverflow(_)
                | Error::Aliasing(_)
                | Error::NonConvergence(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
