use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("size {size} exceeds limit {limit}")]
    SizeExceeded { size: usize, limit: usize },

    #[error("invalid matrix size {0}, need at least 2")]
    BadSize(usize),

    #[error("matrix has entries with nonzero imaginary part")]
    NotReal,

    #[error("Kraus pair is not trace preserving: |B*B + C*C - I| = {0:e}")]
    NotTracePreserving(f64),

    #[error("Kraus pair does not have the column structure required for reduction")]
    NotReducible,

    #[error("step count {requested} exceeds cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("|det(I - uM(k))| = {magnitude:e} below threshold at grid point {index}")]
    DetNearZero { index: usize, magnitude: f64 },

    #[error("quadrature not converged: |v(2M) - v(M)| = {diff:e} > {tol:e}")]
    NotConverged { diff: f64, tol: f64 },

    #[error("grid size {grid_m} must exceed rmax {rmax}")]
    GridTooCoarse { grid_m: usize, rmax: usize },

    #[error("closed form needs all coin entries nonzero")]
    ZeroEntry,

    #[error("|u| * bound = {value} outside truncation radius {limit}")]
    RadiusViolation { value: f64, limit: f64 },

    #[error("binomial argument {0} exceeds 64-bit guard")]
    Overflow(usize),

    #[error("finite-sum and hypergeometric forms disagree: {0:e}")]
    FormMismatch(f64),

    #[error("coin invariant violated: {0}")]
    InvalidCoin(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite entry")]
    NonFinite,

    #[error("parse error: {0}")]
    Parse(String),
}
