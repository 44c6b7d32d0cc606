use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a precondition (bad N, eps1, order, lengths, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A step-count search hit its cap without reaching the target.
    #[error("target unreachable: error {best_err:e} at R = {cap} still above target {target:e}")]
    Unreachable {
        target: f64,
        cap: u64,
        best_err: f64,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code: 1 for domain problems, 2 for I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Unreachable { .. } | Error::Json(_) => 1,
            Error::Io(_) => 2,
            Error::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(_) => 2,
                _ => 1,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
