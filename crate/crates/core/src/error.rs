use thiserror::Error;

pub type Result<T> = std::result::Result<T, KreinError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KreinError {
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian: ||A - A*||_F = {asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not idempotent: ||P^2 - P||_F = {residual:e} exceeds {tolerance:e}")]
    NotIdempotent { residual: f64, tolerance: f64 },

    #[error("matrix is not a symmetry (J = J* = J^-1)")]
    NotSymmetry,

    #[error("invalid tolerance {name} = {value}")]
    BadTolerance { name: &'static str, value: f64 },

    #[error("invalid parameter {name} = {value}")]
    BadParameter { name: &'static str, value: f64 },

    #[error("rank {rank} is out of range for dimension {dim}")]
    BadRank { dim: usize, rank: usize },

    #[error("basis columns are not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("symmetry parameters violate the family constraint (residual {residual:e})")]
    ConstraintViolated { residual: f64 },

    #[error("parameter {which} is not a symmetry of the right size")]
    NotSymmetryParam { which: &'static str },

    #[error("P + P* - I is numerically singular (smallest |eigenvalue| {lambda_min:e})")]
    SingularShift { lambda_min: f64 },

    #[error("P is not a J-projection: ||JPJ - P*||_F = {residual:e}")]
    NotJProjection { residual: f64 },

    #[error("diagonal block {which} of J is numerically singular")]
    SingularBlock { which: &'static str },

    #[error("block {which} is not invertible between its subspaces (smallest singular value {sigma_min:e})")]
    DegenerateBlock { which: &'static str, sigma_min: f64 },

    #[error("independent computations of {what} disagree (residual {residual:e})")]
    InternalMismatch { what: &'static str, residual: f64 },
}
