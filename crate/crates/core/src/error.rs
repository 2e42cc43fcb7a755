use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("complex dimension must be at least {min}, got {got}")]
    Dimension { min: usize, got: usize },
    #[error("chart index {chart} out of range for CP^{n}")]
    ChartIndex { chart: usize, n: usize },
    #[error("expected {expected} real coordinates, got {got}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("point outside target chart {target}: pivot coordinate is zero")]
    OutsideChart { target: usize },
    #[error("metric is not positive definite")]
    NotPositiveDefinite,
    #[error("scalar curvature not constant: spread {spread:e} exceeds {tol:e}")]
    CurvatureNotConstant { spread: f64, tol: f64 },
    #[error("requires N >= 2 (got N = {0})")]
    RequiresTwo(usize),
    #[error("harmonic decomposition supports bidegree k <= {max}, got {k}")]
    UnsupportedDegree { k: usize, max: usize },
    #[error("polynomial is not bihomogeneous of bidegree ({k}, {k})")]
    NotBihomogeneous { k: usize },
    #[error("average has nonzero imaginary part; integrand is not real-valued")]
    NotRealValued,
    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e}")]
    QuadratureNotConverged { estimate: f64, error: f64 },
    #[error("eigen-residual {residual:e} exceeds {tol:e}; v = 2 psi is not valid")]
    EigenResidual { residual: f64, tol: f64 },
    #[error("Monte Carlo needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("step {step:e} leaves the positive-definite range of the variation")]
    StepTooLarge { step: f64 },
    #[error("linear system for the unknown integrals is singular")]
    SingularSystem,
    #[error("rewriting is not confluent: {0}")]
    NonConfluent(String),
    #[error("reduction did not reach the expected normal form: {0}")]
    ReductionMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
