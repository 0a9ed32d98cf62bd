use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by every module of the crate.
///
/// Variants ending in `Violation` signal that a numerical oracle or envelope
/// check failed; callers such as the CLI map them to a distinct exit status.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {z} lies outside the analyticity strip of half-width {width}")]
    Domain { z: Complex64, width: f64 },
    #[error("point {z} is a pole of the equilibrium")]
    Pole { z: Complex64 },
    #[error("moment of order {order} diverges for decay order d = {decay}")]
    DivergentMoment { order: u32, decay: f64 },
    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error {error:e} after {intervals} intervals")]
    QuadratureFailure { estimate: f64, error: f64, intervals: usize },
    #[error("expansion check needs a tail class of {expected}, equilibrium is {found}")]
    TailClassMismatch { expected: &'static str, found: &'static str },
    #[error("empty grid")]
    EmptyGrid,
    #[error("no root bracketed in {lo}..{hi}")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("expected {expected} roots, found {found}")]
    RootCountMismatch { expected: usize, found: usize },
    #[error("root {root} has real part not below |xi| = {xi_abs}")]
    StabilityViolation { root: Complex64, xi_abs: f64 },
    #[error("fixed-point iteration did not converge at r = {r} (last step {last_step:e})")]
    NoConvergence { r: f64, last_step: f64 },
    #[error("dispersion residual {residual:e} exceeds {tolerance:e} at r = {r}")]
    ResidualTooLarge { r: f64, residual: f64, tolerance: f64 },
    #[error("dissipation rate {omega2:e} outside [{lower:e}, {upper:e}] at r = {r}")]
    BracketViolation { r: f64, omega2: f64, lower: f64, upper: f64 },
    #[error("curve refinement exceeded its budget near x = {x}")]
    UnderResolvedCurve { x: f64 },
    #[error("envelope ratio {ratio:e} exceeds constant {constant:e} at |xi| = {xi_abs}, tau = {tau}")]
    EnvelopeViolation { xi_abs: f64, tau: f64, ratio: f64, constant: f64 },
    #[error("dispersion zeros found between the real axis and the shifted contour (count {zeros})")]
    ContourTooHigh { zeros: i64 },
    #[error("no dispersion point available at r = {r}")]
    MissingDispersionPoint { r: f64 },
    #[error("identity violated: lhs {lhs:e}, rhs {rhs:e}")]
    IdentityViolation { lhs: f64, rhs: f64 },
    #[error("mesh mismatch: {left} samples against {right}")]
    MeshMismatch { left: usize, right: usize },
    #[error("forcing is not separable: {0}")]
    NonSeparable(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for oracle and envelope failures, as opposed to bad input.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            Error::StabilityViolation { .. }
                | Error::BracketViolation { .. }
                | Error::EnvelopeViolation { .. }
                | Error::IdentityViolation { .. }
                | Error::ResidualTooLarge { .. }
                | Error::ContourTooHigh { .. }
        )
    }
}
