use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix data has {got} entries, expected {expected} for a {dim}x{dim} matrix")]
    Shape {
        dim: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e}) for matrix\n{matrix}")]
    NoConvergence {
        sweeps: usize,
        off_norm: f64,
        matrix: String,
    },

    #[error("zero-norm vector cannot be normalized")]
    ZeroVector,

    #[error("operator is not a projector: ||P^2 - P||_HS = {residual:e}")]
    NotProjector { residual: f64 },

    #[error("observables do not commute: ||[A, B]||_HS = {norm:e}")]
    NonCommuting { norm: f64 },

    #[error("joint eigenspace labels could not be verified for any perturbation parameter")]
    LabelVerification,

    #[error("projector family is invalid: {0}")]
    InvalidFamily(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("cannot merge a family member with itself (index {0})")]
    SelfMerge(usize),

    #[error("overlap entry {value:e} is negative beyond rounding tolerance")]
    NegativeOverlap { value: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("unknown state '{name}'; valid names: {valid}")]
    UnknownState { name: String, valid: String },

    #[error("cycle length {0} is not supported here (odd n >= 5 required)")]
    InvalidCycleLength(usize),

    #[error("correlator bounds are only defined for n in {{4, 5}}; scenario has n = {0}")]
    UnsupportedCorrelator(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
