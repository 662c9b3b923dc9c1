use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("{what} did not converge within {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("row {row} has zero variance")]
    DegenerateRow { row: usize },
    #[error("pursuit exhausted the partition without a singular submatrix")]
    Exhausted,
    #[error("pruning removed every regulator")]
    EmptyModel,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
}

impl Error {
    /// Whether the failure is numerical (exit code 1) as opposed to usage or I/O (exit code 2).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Singular(_)
                | Error::DegenerateRow { .. }
                | Error::Exhausted
                | Error::EmptyModel
                | Error::NonFinite { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
