//! Linear Vlasov–Poisson theory around radial homogeneous equilibria.
//!
//! The crate evaluates the dispersion function `k` on its analyticity strip,
//! solves the low-frequency dispersion relation, computes Green's functions in
//! closed form and by contour integration, and solves the per-mode Volterra
//! equation for the density.

pub mod error;
pub mod quadrature;
pub mod polyroots;
pub mod equilibria;
pub mod poisson_kernels;
pub mod report;
pub mod dispersion_function;
pub mod dispersion_relation;
pub mod greens_function;
pub mod volterra;
pub mod validation;

pub use error::{Error, Result};
pub use equilibria::{EquilibriumKind, EquilibriumSpec, Moment, RadialEquilibrium, TailClass};
pub use num_complex::Complex64;
pub use poisson_kernels::{KjCoefficients, PoleParams, PoleSet, QjPolynomial};
pub use report::{ExpansionReport, GridSpec};
pub use dispersion_relation::{DispersionPoint, PenroseReport};
pub use greens_function::GreensValue;
pub use volterra::{ForcingSpec, Scheme, VolterraGrid};
