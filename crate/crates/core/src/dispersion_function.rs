//! The dispersion function `k(z) = -∫ m₀'(t)/(z-t) dt`, continued
//! analytically from the lower half-plane across the real axis into the
//! strip, together with `k_eff = k + iπ m₀'` and its expansions.
//!
//! Quadrature evaluation subtracts the singular part: with `T` the
//! truncation radius,
//! `∫ m₀'(t)/(z-t) dt = ∫ [m₀'(t) - m₀'(z)]/(z-t) dt + m₀'(z) [Log(z+T) - Log(z-T)]`,
//! where the first integrand is the analytic difference quotient. On the real
//! axis the logarithm becomes the principal value `ln((T+x)/(T-x))`.

use std::f64::consts::PI;

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;
use serde::Serialize;

use crate::equilibria::{EquilibriumKind, RadialEquilibrium, TailClass};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadConfig};
use crate::report::ExpansionReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    LowerHalf,
    RealAxis,
    UpperHalf,
}

impl Region {
    pub fn of(z: Complex64) -> Self {
        if z.im < 0.0 {
            Region::LowerHalf
        } else if z.im > 0.0 {
            Region::UpperHalf
        } else {
            Region::RealAxis
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::LowerHalf => "lower",
            Region::RealAxis => "real",
            Region::UpperHalf => "upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    PlemeljPV,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::PlemeljPV => "plemelj_pv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KValue {
    pub z: Complex64,
    pub k: Complex64,
    pub region: Region,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KEffValue {
    pub z: Complex64,
    pub k_eff: Complex64,
}

/// Beyond this modulus the Maxwellian `k_eff` is summed from its asymptotic
/// series instead of `-2 + 4zD(z)`, which cancels badly.
const MAXWELLIAN_ASYMPTOTIC_RADIUS: f64 = 10.0;

fn check_domain(z: Complex64, width: f64) -> Result<()> {
    if !RadialEquilibrium::in_strip(z, width) {
        return Err(Error::Domain { z, width });
    }
    Ok(())
}

/// `k(z)` on `𝒟_{ϑ'}`, by closed form where one exists.
pub fn eval_k(eq: &RadialEquilibrium, z: Complex64) -> Result<KValue> {
    check_domain(z, eq.theta_prime())?;
    eval_k_in_strip(eq, z)
}

/// `k(z)` anywhere in the analyticity strip `𝒟_ϑ`.
pub fn eval_k_in_strip(eq: &RadialEquilibrium, z: Complex64) -> Result<KValue> {
    check_domain(z, eq.theta())?;
    if let Some(k) = closed_form(eq, z) {
        return Ok(KValue { z, k, region: Region::of(z), method: Method::ClosedForm });
    }
    eval_k_quadrature(eq, z, &QuadConfig::tight())
}

/// `k(z)` by quadrature of the three-branch definition, for any kind.
pub fn eval_k_quadrature(eq: &RadialEquilibrium, z: Complex64, cfg: &QuadConfig) -> Result<KValue> {
    check_domain(z, eq.theta())?;
    let region = Region::of(z);
    let t_max = eq.truncation_radius().max(4.0 * (z.re.abs() + 1.0));
    let mp_z = eq.m0_prime_unchecked(z);
    let mpp_z = eq.m0_second_unchecked(z);
    let quotient = |t: f64| {
        let tc = Complex64::new(t, 0.0);
        let dz = z - tc;
        if dz.norm() < 1e-9 {
            // Limit of the difference quotient.
            -mpp_z
        } else {
            (eq.m0_prime_unchecked(tc) - mp_z) / dz
        }
    };
    let bp = quadrature::geometric_breakpoints(t_max, z.re, 0.5);
    let regular = quadrature::integrate(quotient, &bp, cfg).into_result()?;
    let log_term = match region {
        Region::RealAxis => Complex64::new(((t_max + z.re) / (t_max - z.re)).ln(), 0.0),
        _ => (z + t_max).ln() - (z - t_max).ln(),
    };
    let integral = regular + mp_z * log_term;
    let (k, method) = match region {
        Region::LowerHalf => (-integral, Method::Quadrature),
        Region::RealAxis => (-integral - Complex64::i() * PI * mp_z, Method::PlemeljPV),
        Region::UpperHalf => (-integral - 2.0 * Complex64::i() * PI * mp_z, Method::Quadrature),
    };
    Ok(KValue { z, k, region, method })
}

fn closed_form(eq: &RadialEquilibrium, z: Complex64) -> Option<Complex64> {
    match eq.kind() {
        EquilibriumKind::GeneralizedPoisson(_) => {
            let a = eq.kernel_coefficients()?;
            let w = 1.0 + Complex64::i() * z;
            let inv = 1.0 / w;
            let mut pow = inv * inv;
            let mut k = Complex64::new(0.0, 0.0);
            for ap in a {
                k -= ap * pow;
                pow *= inv;
            }
            Some(k)
        }
        EquilibriumKind::Maxwellian => Some(maxwellian_k_eff(z) + 2.0 * Complex64::i() * PI.sqrt() * z * (-z * z).exp()),
        EquilibriumKind::Custom => None,
    }
}

fn maxwellian_k_eff(z: Complex64) -> Complex64 {
    if z.norm() < MAXWELLIAN_ASYMPTOTIC_RADIUS {
        -2.0 + 4.0 * z * z.dawson()
    } else {
        // 2 Σ_{n≥1} (2n-1)!! / (2z²)^n
        let x = 1.0 / (2.0 * z * z);
        let mut term = Complex64::new(2.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 1..60 {
            term *= (2 * n - 1) as f64 * x;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    }
}

fn maxwellian_k_eff_prime(z: Complex64) -> Complex64 {
    if z.norm() < MAXWELLIAN_ASYMPTOTIC_RADIUS {
        let d = z.dawson();
        4.0 * d + 4.0 * z - 8.0 * z * z * d
    } else {
        let x = 1.0 / (2.0 * z * z);
        let mut term = Complex64::new(2.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 1..60 {
            term *= (2 * n - 1) as f64 * x;
            let d = -2.0 * n as f64 / z * term;
            sum += d;
            if d.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    }
}

/// `k'(z)`, in closed form for the built-in kinds and by a Cauchy circle
/// otherwise.
pub fn eval_k_prime(eq: &RadialEquilibrium, z: Complex64) -> Result<Complex64> {
    check_domain(z, eq.theta())?;
    match eq.kind() {
        EquilibriumKind::GeneralizedPoisson(_) => {
            let a = eq.kernel_coefficients().expect("poisson kinds carry coefficients");
            let w = 1.0 + Complex64::i() * z;
            let inv = 1.0 / w;
            let mut pow = inv * inv * inv;
            let mut dk = Complex64::new(0.0, 0.0);
            for (p, ap) in a.iter().enumerate() {
                dk += ap * (p as f64 + 2.0) * Complex64::i() * pow;
                pow *= inv;
            }
            Ok(dk)
        }
        EquilibriumKind::Maxwellian => {
            let e = (-z * z).exp();
            Ok(maxwellian_k_eff_prime(z) + 2.0 * Complex64::i() * PI.sqrt() * (1.0 - 2.0 * z * z) * e)
        }
        EquilibriumKind::Custom => {
            let radius = cauchy_radius(eq, z);
            let err = std::cell::RefCell::new(None);
            let d = quadrature::cauchy_derivative(
                |w| match eval_k_in_strip(eq, w) {
                    Ok(v) => v.k,
                    Err(e) => {
                        err.borrow_mut().get_or_insert(e);
                        Complex64::new(f64::NAN, 0.0)
                    }
                },
                z,
                radius,
                64,
            );
            match err.into_inner() {
                Some(e) => Err(e),
                None => Ok(d),
            }
        }
    }
}

/// Radius `min(0.1, distance to the strip edge)/2` for Cauchy differentiation.
pub fn cauchy_radius(eq: &RadialEquilibrium, z: Complex64) -> f64 {
    // Distance to the boundary lines |Im w| = ϑ(1+|Re w|), measured along
    // their normal.
    let theta = eq.theta();
    let gap = theta * (1.0 + z.re.abs()) - z.im.abs();
    let dist = gap / (1.0 + theta * theta).sqrt();
    0.5 * dist.clamp(1e-6, 0.1)
}

/// `k_eff(z) = k(z) + iπ m₀'(z)` on `𝒟_{ϑ'}`.
pub fn eval_k_eff(eq: &RadialEquilibrium, z: Complex64) -> Result<KEffValue> {
    check_domain(z, eq.theta_prime())?;
    let k_eff = match eq.kind() {
        EquilibriumKind::Maxwellian => maxwellian_k_eff(z),
        _ => eval_k_in_strip(eq, z)?.k + Complex64::i() * PI * eq.m0_prime_unchecked(z),
    };
    Ok(KEffValue { z, k_eff })
}

/// Sample points on the circle of radius `r` that stay inside `𝒟_{width}`.
fn strip_circle(r: f64, width: f64) -> Vec<Complex64> {
    let psi = (0.5 * width).atan();
    [0.0, psi, -psi]
        .iter()
        .flat_map(|&a| {
            let w = Complex64::from_polar(r, a);
            [w, -w]
        })
        .collect()
}

/// Fits `|k(z) - k(0) + iπ m₀''(0) z|` against `|z|` for radii in `(0, 1]`.
pub fn check_expansion_zero(eq: &RadialEquilibrium, radii: &[f64]) -> Result<ExpansionReport> {
    if radii.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let k0 = eval_k(eq, Complex64::new(0.0, 0.0))?.k;
    let slope = Complex64::i() * PI * eq.m0_second_unchecked(Complex64::new(0.0, 0.0));
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidArgument(format!("radius {r} outside (0, 1]")));
        }
        let mut worst: f64 = 0.0;
        for z in strip_circle(r, eq.theta_prime()) {
            let k = eval_k(eq, z)?.k;
            worst = worst.max((k - k0 + slope * z).norm());
        }
        samples.push((r, worst));
    }
    Ok(ExpansionReport::from_samples(samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfinityOrder {
    General,
    ThinTail,
}

/// Largest remainder of the expansion of `k_eff` at infinity, divided by the
/// envelope `|z|^{-d-1} + |z|^{-4} log|z|` (general) or
/// `|z|^{-d-1} + |z|^{-6} log|z|` (thin tail), over radii `≥ 4`.
pub fn check_expansion_infinity(eq: &RadialEquilibrium, radii: &[f64], order: InfinityOrder) -> Result<ExpansionReport> {
    if radii.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let a2 = match order {
        InfinityOrder::ThinTail => {
            if eq.tail_class() != TailClass::ThinTail {
                return Err(Error::TailClassMismatch { expected: TailClass::ThinTail.name(), found: eq.tail_class().name() });
            }
            eq.variance().ok_or(Error::TailClassMismatch { expected: "finite variance", found: "infinite variance" })?
        }
        InfinityOrder::General => 0.0,
    };
    let d = eq.decay_order();
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r >= 4.0) {
            return Err(Error::InvalidArgument(format!("radius {r} below 4")));
        }
        let mut worst: f64 = 0.0;
        for z in strip_circle(r, eq.theta_prime()) {
            let ke = eval_k_eff(eq, z)?.k_eff;
            let z2 = 1.0 / (z * z);
            let rem = match order {
                InfinityOrder::General => ke - z2,
                InfinityOrder::ThinTail => ke - z2 - 3.0 * a2 * z2 * z2,
            };
            worst = worst.max(rem.norm());
        }
        samples.push((r, worst));
    }
    let tail_power = match order {
        InfinityOrder::General => 4,
        InfinityOrder::ThinTail => 6,
    };
    Ok(ExpansionReport::from_samples(samples).with_envelope(|r| r.powf(-d - 1.0) + r.powi(-tail_power) * r.ln()))
}

/// Empirical `A` with `|k(z)| ≤ A (1+|z|)^{-2}` on the given points.
pub fn estimate_decay_constant(eq: &RadialEquilibrium, points: &[Complex64]) -> Result<f64> {
    let mut a: f64 = 0.0;
    for &z in points {
        let k = eval_k_in_strip(eq, z)?.k;
        a = a.max(k.norm() * (1.0 + z.norm()).powi(2));
    }
    Ok(a)
}
