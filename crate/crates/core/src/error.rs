use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square and non-empty (got {rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("off-diagonal entry ({row}, {col}) = {value} is negative")]
    NegativeOffDiagonal { row: usize, col: usize, value: f64 },

    #[error("column {column} sums to {sum:e}, cannot scale to a stochastic matrix")]
    ZeroColumnSum { column: usize, sum: f64 },

    #[error("eigendecomposition residual {residual:e} exceeds tolerance {tolerance:e}")]
    ConvergenceFailure { residual: f64, tolerance: f64 },

    #[error("principal eigenvector entry {index} = {value:e} is negative after sign fixing")]
    PerronViolation { index: usize, value: f64 },

    #[error("matrix has negative off-diagonal entries; it is not stoquastic")]
    NotStoquastic,

    #[error(
        "matrix is reducible; the Perron-Frobenius guarantees for the principal eigenpair \
         require an irreducible matrix with non-negative off-diagonal entries"
    )]
    Reducible,

    #[error("no irreducible draw after {attempts} attempts")]
    IrreducibleGenerationFailure { attempts: usize },

    #[error("{qubits} qubits exceeds the configured cap of {cap}")]
    DimensionOverflow { qubits: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("second-register outcome 0 has probability {p_zero:e}; cannot condition on it")]
    DegenerateConditioning { p_zero: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for failures caused by the filesystem rather than by the input values.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}
