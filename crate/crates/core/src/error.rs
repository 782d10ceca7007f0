use thiserror::Error;

/// Failures raised by the dense linear-algebra layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max |a - a^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },
    #[error("eigenvector matrix is ill-conditioned (cond estimate {estimate:e})")]
    IllConditioned { estimate: f64 },
    #[error("matrix exponential needs {exponent} squarings, above the cap of {cap}")]
    Overflow { exponent: u32, cap: u32 },
    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    Singular { pivot: f64, column: usize },
    #[error("non-finite entry produced by {0}")]
    NonFinite(&'static str),
}

/// Crate-level error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("first-order AC Stark expansion diverges at zero detuning")]
    DegenerateDetuning,
    #[error("eigenstate labeling is ambiguous (weakest assigned overlap {min_overlap:.6})")]
    AmbiguousLabeling { min_overlap: f64 },
    #[error("state vector is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },
    #[error("spin-preserving transition dipole vanishes")]
    DivisionByZero,
    #[error("trace drifted by {drift:e} at t = {t} ns")]
    TraceDrift { drift: f64, t: f64 },
    #[error("{what} did not converge: {detail}")]
    NoConvergence { what: &'static str, detail: String },
    #[error("integrator step underflow at t = {t} ns (h = {h:e} ns)")]
    StepUnderflow { t: f64, h: f64 },
    #[error("integration end time {t_end} ns exceeds the cap of {cap} ns")]
    CapExceeded { t_end: f64, cap: f64 },
    #[error("requested time {t} ns outside the sampled range [{start}, {end}] ns")]
    OutOfRange { t: f64, start: f64, end: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
