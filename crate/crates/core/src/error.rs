use num_complex::Complex64;
use thiserror::Error;

/// Failures raised by the evaluators, the counting machinery and the locator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite argument: {0}")]
    NonFinite(String),
    #[error("log-gamma evaluated at a pole: {0}")]
    GammaPole(Complex64),
    #[error("chi(s) is singular at {0}")]
    ChiSingular(Complex64),
    #[error("eta is degenerate at s = 1")]
    DegenerateEta,
    #[error("series diverges: ratio {ratio} is outside the convergence disc")]
    SeriesDivergence { ratio: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integration path at {0} passes through a pole")]
    PathThroughPole(f64),
    #[error("quadrature did not converge at {point}: estimate {estimate:e}")]
    NonConvergence { point: Complex64, estimate: f64 },
    #[error("point {0} lies outside the asymptotic region")]
    Region(Complex64),
    #[error("near-zero denominator cos(2 pi eta) at {0}")]
    NearZeroDenominator(Complex64),
    #[error("zeta has a pole at s = 1")]
    ZetaPole,
    #[error("function vanishes on or near the path at {0}")]
    ZeroOnPath(Complex64),
    #[error("winding value {0} is not close to an integer")]
    NonInteger(f64),
    #[error("contour could not be moved off a zero near t = {0}")]
    PersistentContourZero(f64),
    #[error("Newton refinement did not converge from {0}")]
    RefineFailed(Complex64),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
