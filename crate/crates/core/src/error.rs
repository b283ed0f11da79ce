//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MdpError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for dimension {n} (1-based external indexing)")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("matrix is not Hermitian: max asymmetry {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("enumeration budget exceeded: {required} terms requested, budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("polynomial is not real-rooted: {detail}")]
    NotRealRooted { detail: String },

    #[error("root finding failed to converge: {detail}")]
    RootNonConvergence { detail: String },

    #[error("degree-zero polynomial has no roots")]
    DegreeZero,

    #[error("polynomial degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix diagonal is not zero: max |diagonal| {max_abs:.3e} exceeds {tol:.3e}")]
    NonZeroDiagonal { max_abs: f64, tol: f64 },

    #[error("matrix is not a contraction: operator norm {norm:.6} exceeds 1 + {tol:.1e}")]
    NotContraction { norm: f64, tol: f64 },

    #[error("matrix trace {trace_abs:.3e} is not zero within {tol:.3e}")]
    NonZeroTrace { trace_abs: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPsd { min_eig: f64 },

    #[error("spectra of the two coefficient matrices nearly collide (min gap {gap:.3e}); Sylvester system ill-posed")]
    SpectralCollision { gap: f64 },

    #[error("no admissible index at step {step}: best candidate root {best:.12} exceeds node value {node:.12} beyond tolerance")]
    NoAdmissibleIndex { step: usize, best: f64, node: f64 },

    #[error("greedy root trace increased at step {step}: {previous:.12} -> {current:.12}")]
    MonotonicityViolation { step: usize, previous: f64, current: f64 },

    #[error("certified bound violated: {detail}")]
    BoundViolation { detail: String },

    #[error("conference matrix of order {m} is not supported (need m = q+1, q prime, q ≡ 1 mod 4)")]
    UnsupportedConferenceOrder { m: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, MdpError>;
