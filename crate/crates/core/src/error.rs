use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max asymmetry {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("trace must be 1, got {trace}")]
    TraceMismatch { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("structure constant has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("integration diverged after t = {last_valid_time}")]
    Divergence { last_valid_time: f64 },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("point is not on the unit sphere (|psi|^2 = {norm_sq})")]
    OffSphere { norm_sq: f64 },

    #[error("point is outside the punctured Hilbert space")]
    ZeroVector,

    #[error("contact structure is degenerate at this point (|det| = {det:e})")]
    DegenerateContact { det: f64 },

    #[error("implicit equation: {what} is singular (|det| = {det:e}) at state {state:?}")]
    ImplicitSystem {
        what: &'static str,
        det: f64,
        state: Vec<f64>,
    },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("state left the domain of the chart: {0}")]
    OutsideDomain(&'static str),

    #[error("matrix is not the representative matrix of a second-order system: {0}")]
    WrongBlockStructure(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
