use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum VolterraError {
    #[error("interval end must be positive, got {0}")]
    NonPositiveInterval(f64),

    #[error("exponent m must be positive, got {0}")]
    NonPositiveExponent(f64),

    #[error("panel count must be an even integer >= 2, got {0}: the midpoint scheme tiles the grid with panels of width 2h")]
    BadPanelCount(usize),

    #[error("kernel arguments outside the triangle 0 <= t <= x: x={x}, t={t}")]
    KernelDomain { x: f64, t: f64 },

    #[error("kernel violates the positivity bound: lower bound {0} <= 0")]
    KernelBound(f64),

    #[error("the scheme does not define node {0}: iteration starts at n = 2")]
    NodeOutOfRange(usize),

    #[error("weight rule produced a nonpositive weight w[{n},{i}] = {w}")]
    NonPositiveWeight { n: usize, i: usize, w: f64 },

    #[error("solver aborted at node {index}: {reason}")]
    SolverAbort { index: usize, reason: String },

    #[error("adaptive integration did not converge (residual error estimate {0:e})")]
    IntegrationFailure(f64),

    #[error("zeta evaluator is defined only on (0,1), got s = {0}")]
    ZetaDomain(f64),

    #[error("evaluation point {0} is not a node of the grid (no interpolation is performed)")]
    OffGridPoint(f64),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, VolterraError>;
