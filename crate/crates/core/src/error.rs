use thiserror::Error;

/// Errors produced across the library.
///
/// The CLI maps these onto its exit-code contract: mathematical
/// non-applicability (an operator outside the membership algebra, a
/// non-A-invertible operator, a law failure) exits 1, while usage,
/// parse and dimension problems exit 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds {bound:.3e}")]
    NotHermitian { asymmetry: f64, bound: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.6e} below clamp bound {bound:.6e}")]
    NotPsd { eigenvalue: f64, bound: f64 },

    #[error("weight must be nonzero (numeric rank 0)")]
    ZeroWeight,

    #[error("operator is not in the membership algebra M^A (defect {defect:.3e} exceeds {bound:.3e})")]
    NotInMemberAlgebra { defect: f64, bound: f64 },

    #[error("operator is not A-invertible ({reason})")]
    NotAInvertible { reason: String },

    #[error("eigenvalue iteration did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("unknown law id `{0}`")]
    UnknownLaw(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("truncation size {n} too small (need at least {min})")]
    TruncationTooSmall { n: usize, min: usize },

    #[error("truncation size {n} underflows the linear-domain factorial weights (limit {limit}); use the log-domain mode")]
    UnderflowRisk { n: usize, limit: usize },

    #[error("probe index {index} outside the truncation interior [{lo}, {hi}]")]
    IndexOutOfTruncation { index: i64, lo: i64, hi: i64 },

    #[error("failed to parse matrix file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that signal mathematical non-applicability of an
    /// otherwise well-formed request (exit code 1 in the CLI); everything
    /// else is a usage or I/O problem (exit code 2).
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::NotInMemberAlgebra { .. } | Error::NotAInvertible { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
