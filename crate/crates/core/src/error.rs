use num_complex::Complex64;
use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("evaluation at a pole z = {0}")]
    Pole(Complex64),
    #[error("lambda = infinity: use the infinity-chart realization")]
    UseInfinityRealization,
    #[error("state lies on the line {0}: use the line realization")]
    UseLineRealization(String),
    #[error("theta_inf = 0 makes the system degenerate")]
    DegenerateThetaInf,
    #[error("a12 vanishes identically: the system is first-order reducible")]
    FirstOrderReducible,
    #[error("not of Heun shape: {0}")]
    NotHeunShaped(String),
    #[error("chart transition undefined: {0}")]
    TransitionUndefined(String),
    #[error("no gluing between {0} and {1}")]
    NoGluing(String, String),
    #[error("line {0} is not realizable as a Fuchsian system")]
    NotRealizable(String),
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),
    #[error("generator s{generator} undefined at word position {position}")]
    GeneratorUndefined { generator: u8, position: usize },
    #[error("map undefined: {0}")]
    MapUndefined(String),
    #[error("gauge undefined: {0}")]
    GaugeUndefined(String),
    #[error("invariant subspace undefined: {0}")]
    KernelUndefined(String),
    #[error("wrong branch: {0}")]
    WrongBranch(String),
    #[error("germ does not solve the source system (residual {0:e})")]
    BadGerm(f64),
    #[error("logarithmic case at exponent {0}")]
    LogarithmicCase(Complex64),
    #[error("point is not a regular singularity: {0}")]
    NotRegularSingular(String),
    #[error("path passes too close to a singular point {0}")]
    PathTooClose(Complex64),
    #[error("branch tracking failed: {0}")]
    BranchError(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureError(String),
    #[error("verification failed: residual {residual:e} exceeds {threshold:e}")]
    VerificationFailure { residual: f64, threshold: f64 },
    #[error("consistency failure: residual {0:e}")]
    ConsistencyFailure(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
