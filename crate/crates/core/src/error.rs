use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("curvature radius is not positive (minimum {min_radius:.3e} at tangent angle {angle:.6})")]
    NonConvex { min_radius: f64, angle: f64 },
    #[error("first harmonic of the curvature radius must vanish for a closed curve (a1 = {a1:.3e}, b1 = {b1:.3e})")]
    NotClosed { a1: f64, b1: f64 },
    #[error("ellipse axis ratio must lie in (0, 1], got {0}")]
    BadAxisRatio(f64),
    #[error("invalid profile: {0}")]
    InvalidProfile(&'static str),
    #[error("chord endpoints coincide on the boundary (x = {x}, x̄ = {x_bar})")]
    DegenerateChord { x: f64, x_bar: f64 },
    #[error("billiard step failed: {reason} (bracket [{lo:.15}, {hi:.15}])")]
    SolverFailure { reason: &'static str, lo: f64, hi: f64 },
    #[error("invalid rotation number {p}/{q}: {reason}")]
    InvalidRotation { p: i64, q: i64, reason: &'static str },
    #[error("action minimization did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("could not restore the cyclic order of the configuration")]
    OrderViolation,
    #[error("{0} looks rational; use beta_rational instead")]
    RationalInput(f64),
    #[error("least-squares system is ill conditioned (condition number {0:.3e})")]
    IllConditioned(f64),
    #[error("truncation orders differ: {0}")]
    OrderMismatch(&'static str),
    #[error("substitution is not near the identity: {0}")]
    NotNearIdentity(&'static str),
    #[error("series has a constant term")]
    HasConstantTerm,
    #[error("series must start as y + O(y^2)")]
    BadLeadingCoefficient,
    #[error("constraint violated at order {k}: {what} residual {residual:.3e}")]
    ConstraintViolation { k: usize, what: &'static str, residual: f64 },
    #[error("requested order {requested} exceeds the certified seed order {available}")]
    SeedOrderExceeded { requested: usize, available: usize },
    #[error("requested order {requested} exceeds what the input supports ({available})")]
    OrderExceeded { requested: usize, available: usize },
}
