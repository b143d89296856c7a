use std::path::PathBuf;

/// Errors produced anywhere in the basis → orbitals → CI → entropy pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range (valid: {valid})")]
    IndexOutOfRange { index: usize, valid: String },

    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("unsupported symmetry: {0}")]
    UnsupportedSymmetry(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("eigensolver failed to converge: {0}")]
    Convergence(String),

    #[error("Hamiltonian of dimension {dim} needs {required_bytes} bytes, budget is {budget_bytes}")]
    MemoryBudgetExceeded {
        dim: usize,
        required_bytes: u64,
        budget_bytes: u64,
    },

    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),

    #[error("reduced density matrix has negative eigenvalue {value:e} in l={l} block")]
    NegativeEigenvalue { l: usize, value: f64 },

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("purity {0} outside (0, 1]")]
    InvalidPurity(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error in {what}: {msg}")]
    Parse { what: String, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user input rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Config(_)
                | Error::Parse { .. }
                | Error::UnsupportedSymmetry(_)
                | Error::InvalidQuantumNumbers(_)
                | Error::InvalidCoupling(_)
        )
    }
}
