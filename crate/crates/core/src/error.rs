use thiserror::Error;

/// Errors raised by channel construction and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("map is not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("Choi matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("Choi matrix has a negative eigenvalue {min_eigenvalue:.3e}")]
    NegativeChoi { min_eigenvalue: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("input contains non-finite entries")]
    NonFinite,

    #[error("dimension must be at least 2, got {0}")]
    DegenerateDimension(usize),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("normalization operator t1*(1) is singular (det {det:.3e})")]
    SingularNormalization { det: f64 },

    #[error("invalid Lindblad generator: {0}")]
    InvalidGenerator(String),

    #[error("no convergence after {iterations} iterations (last value {last:.6e}, residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        residual: f64,
    },

    #[error("operation requires a qubit channel, got dimension {0}")]
    WrongDimension(usize),

    #[error("operation requires Kraus rank at most {max}, got {rank}")]
    WrongRank { rank: usize, max: usize },

    #[error("parameter {name} = {value} out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("degenerate rank-two class parameter {name} = {value}")]
    DegenerateClass { name: &'static str, value: f64 },

    #[error("semigroup needs strictly positive lambda, got {0:?}")]
    NonPositiveLambda([f64; 3]),

    #[error("channel is not infinitesimal divisible")]
    NotInfinitesimalDivisible,

    #[error("channel is infinitesimal divisible only as a limit; no finite Markovian product exists")]
    ClosureOnly,

    #[error("unknown property suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, ChannelError>;
