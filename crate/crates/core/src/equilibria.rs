//! Radial equilibria through their reduced one-dimensional profile `m₀`.
//!
//! Built-in kinds are the Maxwellian `π^{-1/2} e^{-z²}` and the generalized
//! Poisson family `c'_j (1+z²)^{-j}`. Custom profiles are closed-form
//! callbacks with a declared strip width and decay order.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::poisson_kernels;
use crate::quadrature::{self, QuadConfig};

pub type ProfileFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Maxwellian,
    GeneralizedPoisson(u32),
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClass {
    ThinTail,
    FatTail,
}

impl TailClass {
    pub fn name(self) -> &'static str {
        match self {
            TailClass::ThinTail => "thin-tail",
            TailClass::FatTail => "fat-tail",
        }
    }
}

#[derive(Clone)]
enum Profile {
    Maxwellian,
    Poisson { j: u32, c: f64, fourier: Vec<f64>, kernel: Vec<f64> },
    PowerLaw { c: f64 },
    Callback { m0: ProfileFn, m0_prime: ProfileFn },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub order: u32,
    pub value: f64,
}

/// An acceptable radial equilibrium, represented by its reduced profile.
#[derive(Clone)]
pub struct RadialEquilibrium {
    kind: EquilibriumKind,
    theta: f64,
    theta_prime: f64,
    decay: f64,
    profile: Profile,
}

impl fmt::Debug for RadialEquilibrium {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialEquilibrium")
            .field("kind", &self.kind)
            .field("theta", &self.theta)
            .field("theta_prime", &self.theta_prime)
            .field("decay", &self.decay)
            .finish()
    }
}

/// Truncation radius used for the Maxwellian, where `e^{-T²}` is far below
/// double precision relative to the peak.
const MAXWELLIAN_CUTOFF: f64 = 8.0;

impl RadialEquilibrium {
    pub fn maxwellian() -> Self {
        let theta = PI / 4.0;
        Self { kind: EquilibriumKind::Maxwellian, theta, theta_prime: theta / 2.0, decay: f64::INFINITY, profile: Profile::Maxwellian }
    }

    pub fn generalized_poisson(j: u32) -> Result<Self> {
        let q = poisson_kernels::qj_polynomial(j)?;
        let jf = j as f64;
        let c = gamma(jf) / (PI.sqrt() * gamma(jf - 0.5));
        let theta = 0.5;
        Ok(Self {
            kind: EquilibriumKind::GeneralizedPoisson(j),
            theta,
            theta_prime: theta / 2.0,
            decay: 2.0 * jf,
            profile: Profile::Poisson { j, c, fourier: q.normalized_f64(), kernel: poisson_kernels::kj_coefficients(j)?.a_f64() },
        })
    }

    /// `c_d (1+z²)^{-d/2}` for real `d > 1`, exposed as a custom kind.
    pub fn power_law(d: f64) -> Result<Self> {
        if !(d > 1.0 && d.is_finite()) {
            return Err(Error::InvalidArgument(format!("power-law decay order must exceed 1, got {d}")));
        }
        let c = (ln_gamma(d / 2.0) - ln_gamma((d - 1.0) / 2.0)).exp() / PI.sqrt();
        let theta = 0.5;
        Ok(Self { kind: EquilibriumKind::Custom, theta, theta_prime: theta / 2.0, decay: d, profile: Profile::PowerLaw { c } })
    }

    /// A custom analytic profile. Analyticity and the declared `(ϑ, d)` are
    /// taken on trust; only sampled invariants can be checked.
    pub fn custom(theta: f64, decay: f64, m0: ProfileFn, m0_prime: ProfileFn) -> Result<Self> {
        if !(theta > 0.0 && theta <= PI / 4.0) {
            return Err(Error::InvalidArgument(format!("strip width must lie in (0, pi/4], got {theta}")));
        }
        if !(decay > 1.0) {
            return Err(Error::InvalidArgument(format!("decay order must exceed 1, got {decay}")));
        }
        Ok(Self {
            kind: EquilibriumKind::Custom,
            theta,
            theta_prime: theta / 2.0,
            decay,
            profile: Profile::Callback { m0, m0_prime },
        })
    }

    /// Narrows the strip; widths beyond the natural one are rejected.
    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= self.theta) {
            return Err(Error::InvalidArgument(format!("strip width {theta} outside (0, {}]", self.theta)));
        }
        self.theta = theta;
        self.theta_prime = self.theta_prime.min(theta / 2.0);
        Ok(self)
    }

    pub fn with_theta_prime(mut self, theta_prime: f64) -> Result<Self> {
        if !(theta_prime > 0.0 && theta_prime < self.theta) {
            return Err(Error::InvalidArgument(format!("theta' must lie in (0, {})", self.theta)));
        }
        self.theta_prime = theta_prime;
        Ok(self)
    }

    pub fn kind(&self) -> EquilibriumKind {
        self.kind
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta_prime(&self) -> f64 {
        self.theta_prime
    }

    pub fn decay_order(&self) -> f64 {
        self.decay
    }

    pub fn tail_class(&self) -> TailClass {
        if self.decay > 3.0 {
            TailClass::ThinTail
        } else {
            TailClass::FatTail
        }
    }

    pub fn poisson_index(&self) -> Option<u32> {
        match self.kind {
            EquilibriumKind::GeneralizedPoisson(j) => Some(j),
            _ => None,
        }
    }

    /// `a_p^{(j)}` for the generalized Poisson kinds.
    pub fn kernel_coefficients(&self) -> Option<&[f64]> {
        match &self.profile {
            Profile::Poisson { kernel, .. } => Some(kernel),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            EquilibriumKind::Maxwellian => "maxwellian".into(),
            EquilibriumKind::GeneralizedPoisson(j) => format!("gp{j}"),
            EquilibriumKind::Custom => format!("custom(d={})", self.decay),
        }
    }

    /// Normalizing constant of the closed form (`c'_j`, `π^{-1/2}`, `c_d`).
    pub fn normalization(&self) -> Option<f64> {
        match &self.profile {
            Profile::Maxwellian => Some(1.0 / PI.sqrt()),
            Profile::Poisson { c, .. } | Profile::PowerLaw { c } => Some(*c),
            Profile::Callback { .. } => None,
        }
    }

    pub fn in_strip(z: Complex64, width: f64) -> bool {
        z.im.abs() < width * (1.0 + z.re.abs())
    }

    fn check(&self, z: Complex64, width: f64) -> Result<()> {
        if !Self::in_strip(z, width) {
            return Err(Error::Domain { z, width });
        }
        if matches!(self.profile, Profile::Poisson { .. } | Profile::PowerLaw { .. }) && (1.0 + z * z).norm() < 1e-300 {
            return Err(Error::Pole { z });
        }
        Ok(())
    }

    pub fn eval_m0(&self, z: Complex64) -> Result<Complex64> {
        if matches!(self.profile, Profile::Poisson { .. } | Profile::PowerLaw { .. }) && (1.0 + z * z).norm() == 0.0 {
            return Err(Error::Pole { z });
        }
        self.check(z, self.theta)?;
        Ok(self.m0_unchecked(z))
    }

    pub fn eval_m0_prime(&self, z: Complex64) -> Result<Complex64> {
        self.check(z, self.theta)?;
        Ok(self.m0_prime_unchecked(z))
    }

    pub fn eval_m0_second(&self, z: Complex64) -> Result<Complex64> {
        self.check(z, self.theta)?;
        Ok(self.m0_second_unchecked(z))
    }

    pub(crate) fn m0_unchecked(&self, z: Complex64) -> Complex64 {
        match &self.profile {
            Profile::Maxwellian => (-z * z).exp() / PI.sqrt(),
            Profile::Poisson { j, c, .. } => *c * (1.0 + z * z).powi(-(*j as i32)),
            Profile::PowerLaw { c } => *c * (-(self.decay / 2.0) * (1.0 + z * z).ln()).exp(),
            Profile::Callback { m0, .. } => m0(z),
        }
    }

    pub(crate) fn m0_prime_unchecked(&self, z: Complex64) -> Complex64 {
        match &self.profile {
            Profile::Maxwellian => -2.0 * z * (-z * z).exp() / PI.sqrt(),
            Profile::Poisson { j, c, .. } => -2.0 * (*j as f64) * *c * z * (1.0 + z * z).powi(-(*j as i32) - 1),
            Profile::PowerLaw { c } => -self.decay * *c * z * (-(self.decay / 2.0 + 1.0) * (1.0 + z * z).ln()).exp(),
            Profile::Callback { m0_prime, .. } => m0_prime(z),
        }
    }

    pub(crate) fn m0_second_unchecked(&self, z: Complex64) -> Complex64 {
        match &self.profile {
            Profile::Maxwellian => (4.0 * z * z - 2.0) * (-z * z).exp() / PI.sqrt(),
            Profile::Poisson { j, c, .. } => {
                let jf = *j as f64;
                let w = 1.0 + z * z;
                *c * (-2.0 * jf * w.powi(-(*j as i32) - 1) + 4.0 * jf * (jf + 1.0) * z * z * w.powi(-(*j as i32) - 2))
            }
            Profile::PowerLaw { c } => {
                let d = self.decay;
                let lw = (1.0 + z * z).ln();
                *c * (-d * (-(d / 2.0 + 1.0) * lw).exp() + d * (d + 2.0) * z * z * (-(d / 2.0 + 2.0) * lw).exp())
            }
            Profile::Callback { m0_prime, .. } => {
                let radius = 0.25 * self.theta * (1.0 + z.re.abs()) - z.im.abs() / 2.0;
                quadrature::cauchy_derivative(|w| m0_prime(w), z, radius.clamp(1e-3, 0.1), 32)
            }
        }
    }

    pub fn m0_real(&self, x: f64) -> f64 {
        self.m0_unchecked(Complex64::new(x, 0.0)).re
    }

    pub fn m0_prime_real(&self, x: f64) -> f64 {
        self.m0_prime_unchecked(Complex64::new(x, 0.0)).re
    }

    /// Radius beyond which the profile is negligible: `e^{-T²}` below double
    /// precision for the Maxwellian, `(1+T)^{-d-1} < 1e-14` otherwise.
    pub fn truncation_radius(&self) -> f64 {
        if self.decay.is_infinite() {
            MAXWELLIAN_CUTOFF
        } else {
            (1e14f64).powf(1.0 / (self.decay + 1.0)) - 1.0
        }
    }

    /// Breakpoints for real-line quadrature of the profile on `[-T, T]`.
    pub fn real_breakpoints(&self) -> Vec<f64> {
        quadrature::geometric_breakpoints(self.truncation_radius(), 0.0, 1.0)
    }

    /// `m̂(s) = ∫ m₀(r) e^{-irs} dr`.
    pub fn eval_m0_fourier(&self, s: f64) -> f64 {
        match &self.profile {
            Profile::Maxwellian => (-s * s / 4.0).exp(),
            Profile::Poisson { fourier, .. } => {
                let x = s.abs();
                fourier.iter().rev().fold(0.0, |acc, c| acc * x + c) * (-x).exp()
            }
            _ => self.fourier_by_contour(s.abs()),
        }
    }

    /// `m̂(s)` for `s ≥ 0` along `x - iϑ'(1+|x|)`, where `e^{-izs}` decays
    /// exponentially; the real line is used at `s = 0`.
    fn fourier_by_contour(&self, s: f64) -> f64 {
        let cfg = QuadConfig::tight();
        if s == 0.0 {
            return quadrature::integrate_semi_infinite(|t| 2.0 * self.m0_real(t), 0.0, &cfg).unwrap_or(f64::NAN);
        }
        let c = self.theta_prime;
        let reach = self.truncation_radius().min(40.0 / (c * s));
        let bp = quadrature::geometric_breakpoints(reach, 0.0, 1.0);
        let path = |x: f64| {
            let z = Complex64::new(x, -c * (1.0 + x.abs()));
            let dz = Complex64::new(1.0, -c * x.signum());
            self.m0_unchecked(z) * (-Complex64::i() * z * s).exp() * dz
        };
        quadrature::integrate(path, &bp, &cfg).value.re
    }

    /// `∫ t^order m₀(t) dt`, in closed form for the built-in kinds.
    pub fn moment(&self, order: u32) -> Result<Moment> {
        if !self.decay.is_infinite() && order as f64 >= self.decay - 1.0 {
            return Err(Error::DivergentMoment { order, decay: self.decay });
        }
        if order % 2 == 1 {
            return Ok(Moment { order, value: 0.0 });
        }
        let n = (order / 2) as f64;
        let value = match &self.profile {
            Profile::Maxwellian => gamma(n + 0.5) / PI.sqrt(),
            Profile::Poisson { j, c, .. } => {
                let jf = *j as f64;
                c * (ln_gamma(n + 0.5) + ln_gamma(jf - n - 0.5) - ln_gamma(jf)).exp()
            }
            _ => quadrature::integrate_semi_infinite(|t| 2.0 * t.powi(order as i32) * self.m0_real(t), 0.0, &QuadConfig::tight())?,
        };
        Ok(Moment { order, value })
    }

    /// The variance `a₂`, when finite.
    pub fn variance(&self) -> Option<f64> {
        self.moment(2).ok().map(|m| m.value)
    }

    /// Radial 3D profile `M₀(|v|)` whose marginal is `m₀`, for built-ins.
    pub fn profile_3d(&self, v_abs: f64) -> Option<f64> {
        match &self.profile {
            Profile::Maxwellian => Some(PI.powf(-1.5) * (-v_abs * v_abs).exp()),
            Profile::Poisson { j, .. } => {
                let jf = *j as f64;
                let c = (ln_gamma(jf + 1.0) - ln_gamma(jf - 0.5)).exp() / PI.powf(1.5);
                Some(c * (1.0 + v_abs * v_abs).powf(-(1.0 + jf)))
            }
            _ => None,
        }
    }
}


/// On-disk description of an equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSpec {
    pub kind: EquilibriumKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Closed-form preset for custom kinds; only `power_law` is built in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    /// Tabulated `(r, m0)` data, kept for plotting only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
}

impl EquilibriumSpec {
    pub fn build(&self) -> Result<RadialEquilibrium> {
        let eq = match self.kind {
            EquilibriumKind::Maxwellian => RadialEquilibrium::maxwellian(),
            EquilibriumKind::GeneralizedPoisson(j) => {
                let eq = RadialEquilibrium::generalized_poisson(j)?;
                if let Some(d) = self.d {
                    if (d - eq.decay_order()).abs() > 1e-12 {
                        return Err(Error::InvalidArgument(format!("gp{j} has d = {}, input says {d}", eq.decay_order())));
                    }
                }
                eq
            }
            EquilibriumKind::Custom => match self.profile.as_deref() {
                Some("power_law") | None => {
                    let d = self.d.ok_or_else(|| Error::InvalidArgument("custom equilibrium needs d".into()))?;
                    RadialEquilibrium::power_law(d)?
                }
                Some(other) => return Err(Error::InvalidArgument(format!("unknown custom profile {other:?}"))),
            },
        };
        match self.theta {
            Some(t) => eq.with_theta(t),
            None => Ok(eq),
        }
    }

    pub fn from_json(text: &str) -> Result<RadialEquilibrium> {
        let spec: EquilibriumSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("equilibrium spec: {e}")))?;
        spec.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_forms_at_origin() {
        let m = RadialEquilibrium::maxwellian();
        assert!((m.eval_m0(c(0.0, 0.0)).unwrap().re - 1.0 / PI.sqrt()).abs() < 1e-15);
        let p = RadialEquilibrium::generalized_poisson(1).unwrap();
        assert!((p.eval_m0(c(0.0, 0.0)).unwrap().re - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn domain_and_pole_errors() {
        let p = RadialEquilibrium::generalized_poisson(2).unwrap();
        assert!(matches!(p.eval_m0(c(0.0, 1.0)), Err(Error::Pole { .. })));
        assert!(matches!(p.eval_m0(c(0.0, 0.6)), Err(Error::Domain { .. })));
        let m = RadialEquilibrium::maxwellian();
        assert!(matches!(m.eval_m0(c(1.0, 2.0)), Err(Error::Domain { .. })));
        assert!(m.eval_m0(c(10.0, 2.0)).is_ok());
    }

    #[test]
    fn fourier_transforms() {
        let p1 = RadialEquilibrium::generalized_poisson(1).unwrap();
        assert!((p1.eval_m0_fourier(2.0) - (-2.0f64).exp()).abs() < 1e-15);
        let m = RadialEquilibrium::maxwellian();
        assert!((m.eval_m0_fourier(1.0) - (-0.25f64).exp()).abs() < 1e-15);
        for eq in [m, p1, RadialEquilibrium::generalized_poisson(3).unwrap(), RadialEquilibrium::power_law(5.0).unwrap()] {
            assert!((eq.eval_m0_fourier(0.0) - 1.0).abs() < 1e-8, "{eq:?}");
        }
    }

    #[test]
    fn fourier_matches_quadrature_for_poisson_family() {
        for j in 2..=4 {
            let eq = RadialEquilibrium::generalized_poisson(j).unwrap();
            // Unit panels out to 3000, where the remaining tail is below 1e-9.
            let bp: Vec<f64> = (0..=3000).map(f64::from).collect();
            let cfg = QuadConfig::tight().with_abs_tol(1e-12);
            for s in [0.3, 1.0, 2.5] {
                let num = quadrature::integrate_real(|r| 2.0 * eq.m0_real(r) * (r * s).cos(), &bp, &cfg).unwrap();
                assert!((num - eq.eval_m0_fourier(s)).abs() < 1e-8, "j = {j}, s = {s}");
            }
        }
    }

    #[test]
    fn contour_fourier_matches_closed_form() {
        let gp2 = RadialEquilibrium::generalized_poisson(2).unwrap();
        let pl4 = RadialEquilibrium::power_law(4.0).unwrap();
        for s in [0.0, 0.1, 1.0, 3.0, -2.0] {
            assert!((gp2.eval_m0_fourier(s) - pl4.eval_m0_fourier(s)).abs() < 1e-9, "s = {s}");
        }
    }

    #[test]
    fn moments_match_quadrature() {
        let m = RadialEquilibrium::maxwellian();
        assert!((m.moment(2).unwrap().value - 0.5).abs() < 1e-15);
        assert!((m.moment(0).unwrap().value - 1.0).abs() < 1e-15);
        let p2 = RadialEquilibrium::generalized_poisson(2).unwrap();
        let a2 = p2.moment(2).unwrap().value;
        let num = quadrature::integrate_semi_infinite(|t| 2.0 * t * t * p2.m0_real(t), 0.0, &QuadConfig::tight()).unwrap();
        assert!((a2 - num).abs() < 1e-8 && a2 > 0.0);
        for j in 1..=5 {
            let eq = RadialEquilibrium::generalized_poisson(j).unwrap();
            assert!((eq.moment(0).unwrap().value - 1.0).abs() < 1e-13);
        }
        assert!(matches!(RadialEquilibrium::generalized_poisson(1).unwrap().moment(2), Err(Error::DivergentMoment { .. })));
        assert_eq!(p2.moment(1).unwrap().value, 0.0);
    }

    #[test]
    fn power_law_normalized() {
        for d in [2.0, 2.5, 4.0, 7.0] {
            let eq = RadialEquilibrium::power_law(d).unwrap();
            let mass = quadrature::integrate_semi_infinite(|t| 2.0 * eq.m0_real(t), 0.0, &QuadConfig::tight()).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "d = {d}: {mass}");
        }
        let gp2 = RadialEquilibrium::generalized_poisson(2).unwrap();
        let pl4 = RadialEquilibrium::power_law(4.0).unwrap();
        let z = c(1.3, 0.2);
        assert!((gp2.eval_m0(z).unwrap() - pl4.eval_m0(z).unwrap()).norm() < 1e-14);
        assert!((gp2.eval_m0_prime(z).unwrap() - pl4.eval_m0_prime(z).unwrap()).norm() < 1e-14);
        assert!((gp2.eval_m0_second(z).unwrap() - pl4.eval_m0_second(z).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn derivatives_consistent() {
        for eq in [RadialEquilibrium::maxwellian(), RadialEquilibrium::generalized_poisson(3).unwrap(), RadialEquilibrium::power_law(3.5).unwrap()] {
            let z = c(0.7, -0.1);
            let d1 = quadrature::cauchy_derivative(|w| eq.m0_unchecked(w), z, 0.05, 64);
            let d2 = quadrature::cauchy_derivative(|w| eq.m0_prime_unchecked(w), z, 0.05, 64);
            assert!((d1 - eq.eval_m0_prime(z).unwrap()).norm() < 1e-12);
            assert!((d2 - eq.eval_m0_second(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn tail_classes() {
        assert_eq!(RadialEquilibrium::generalized_poisson(1).unwrap().tail_class(), TailClass::FatTail);
        assert_eq!(RadialEquilibrium::generalized_poisson(2).unwrap().tail_class(), TailClass::ThinTail);
        assert_eq!(RadialEquilibrium::maxwellian().tail_class(), TailClass::ThinTail);
    }

    #[test]
    fn marginal_of_3d_profile() {
        // ∫_{R²} M(√(r²+ρ²)) dy = 2π ∫_0^∞ M(√(r²+ρ²)) ρ dρ
        for eq in [RadialEquilibrium::maxwellian(), RadialEquilibrium::generalized_poisson(1).unwrap(), RadialEquilibrium::generalized_poisson(2).unwrap()] {
            let r = 0.8;
            let bp: Vec<f64> = std::iter::once(0.0).chain((0..40).map(|k| 2f64.powi(k - 2))).collect();
            let m = quadrature::integrate_real(
                |p| 2.0 * PI * p * eq.profile_3d((r * r + p * p).sqrt()).unwrap(),
                &bp,
                &QuadConfig::tight(),
            )
            .unwrap();
            assert!((m - eq.m0_real(r)).abs() < 1e-9, "{eq:?}");
        }
    }

    #[test]
    fn spec_parsing() {
        let eq = EquilibriumSpec::from_json(r#"{"kind": "maxwellian", "theta": 0.5}"#).unwrap();
        assert_eq!(eq.kind(), EquilibriumKind::Maxwellian);
        assert_eq!(eq.theta(), 0.5);
        let eq = EquilibriumSpec::from_json(r#"{"kind": {"generalized_poisson": 2}, "theta": 0.5, "d": 4}"#).unwrap();
        assert_eq!(eq.poisson_index(), Some(2));
        let eq = EquilibriumSpec::from_json(r#"{"kind": "custom", "theta": 0.4, "d": 5, "profile": "power_law"}"#).unwrap();
        assert_eq!(eq.decay_order(), 5.0);
        assert!(EquilibriumSpec::from_json(r#"{"kind": {"generalized_poisson": 2}, "d": 3}"#).is_err());
        assert!(EquilibriumSpec::from_json(r#"{"kind": "maxwellian", "theta": 1.0}"#).is_err());
        assert!(EquilibriumSpec::from_json(r#"{"kind": "custom"}"#).is_err());
    }
}
