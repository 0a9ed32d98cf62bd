//! Per-mode Green's function `Ĝ(ξ,τ) = δ₀(τ) + smooth(τ)` for `τ ≥ 0`.
//!
//! With `r = |ξ|`,
//! `smooth(τ) = (r/2π) ∫_ℝ k(w)/(r² - k(w)) e^{iwτr} dw`.
//! Contour evaluations integrate the subtracted kernel
//! `Q(r,w) = r²[k(w) - w⁻²] / ((r² - k(w))(r² - w⁻²))`, whose difference from
//! the plain integrand has vanishing integral above the real axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::dispersion_function::eval_k_in_strip;
use crate::dispersion_relation::{solve_zeta, DispersionPoint};
use crate::equilibria::{EquilibriumKind, RadialEquilibrium, TailClass};
use crate::error::{Error, Result};
use crate::poisson_kernels;
use crate::quadrature::{self, QuadConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub oscillatory: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreensValue {
    pub xi_abs: f64,
    pub tau: f64,
    /// Coefficient of `δ₀(τ)`; always 1.
    pub delta_coeff: f64,
    pub smooth: f64,
    /// Imaginary part discarded from `smooth`; roundoff only.
    pub imag: f64,
    pub decomposition: Option<Decomposition>,
}

impl GreensValue {
    fn new(xi_abs: f64, tau: f64, smooth: Complex64, decomposition: Option<Decomposition>) -> Self {
        Self { xi_abs, tau, delta_coeff: 1.0, smooth: smooth.re, imag: smooth.im, decomposition }
    }
}

fn check_args(xi_abs: f64, tau: f64) -> Result<()> {
    if !(xi_abs > 0.0 && xi_abs.is_finite()) {
        return Err(Error::InvalidArgument(format!("|xi| must be positive, got {xi_abs}")));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau must be non-negative, got {tau}")));
    }
    Ok(())
}

/// Residue sum for the generalized Poisson equilibrium of index `j`. The
/// conjugate pair bifurcating from `ζ = ±i` is reported as `oscillatory`.
pub fn greens_closed_form(j: u32, xi_abs: f64, tau: f64) -> Result<GreensValue> {
    check_args(xi_abs, tau)?;
    let poles = poisson_kernels::poles(j, xi_abs)?;
    Ok(closed_form_from(&poles, tau))
}

pub fn closed_form_from(poles: &poisson_kernels::PoleSet, tau: f64) -> GreensValue {
    let top = poles.branch_root();
    let mut oscillatory = Complex64::new(0.0, 0.0);
    let mut error = Complex64::new(0.0, 0.0);
    for (r, c) in poles.roots.iter().zip(&poles.residues) {
        let term = -c * ((r - poles.xi_abs) * tau).exp();
        if (r - top).norm() < 1e-12 * top.norm().max(1.0) || (r - top.conj()).norm() < 1e-12 * top.norm().max(1.0) {
            oscillatory += term;
        } else {
            error += term;
        }
    }
    GreensValue::new(
        poles.xi_abs,
        tau,
        oscillatory + error,
        Some(Decomposition { oscillatory: oscillatory.re, error: error.re }),
    )
}

fn line_config(eq: &RadialEquilibrium) -> QuadConfig {
    match eq.kind() {
        // `k` itself then comes from a truncated quadrature and is noisy
        // well above 1e-13.
        EquilibriumKind::Custom => QuadConfig::default(),
        _ => QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 40_000 },
    }
}

/// Integral of `f(w) dw` along the path `x ↦ w(x)` over `|x| ≤ 64·scale`,
/// continued by the rays `w(±X) + u·d±` for `u ≥ 0`, where
/// `d₊ = direction` and `d₋ = -conj(direction)`. Tilting the rays into the
/// upper half-plane damps `e^{iwτr}` without changing the integral.
fn integrate_contour<F, P>(f: F, path: P, scale: f64, direction: Complex64, cfg: &QuadConfig) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
    P: Fn(f64) -> (Complex64, Complex64),
{
    let x_max = 64.0 * scale;
    let mut bp = vec![0.0];
    let mut x = scale / 16.0;
    while x < x_max {
        bp.push(x);
        bp.push(-x);
        x *= 2.0;
    }
    bp.push(x_max);
    bp.push(-x_max);
    bp.sort_by(f64::total_cmp);
    let core = quadrature::integrate(
        |x| {
            let (w, dw) = path(x);
            f(w) * dw
        },
        &bp,
        cfg,
    )
    .into_result()?;
    let right = path(x_max).0;
    let left = path(-x_max).0;
    let d_left = -direction.conj();
    let tail = |t: f64| {
        let s = 1.0 - t;
        let u = t / s;
        // The left ray runs inward, hence the sign.
        (f(right + u * direction) * direction - f(left + u * d_left) * d_left) / (s * s)
    };
    let tails = quadrature::integrate(tail, &[0.0, 0.5, 0.9, 0.99, 1.0], cfg).into_result()?;
    Ok(core + tails)
}

fn subtracted_kernel(eq: &RadialEquilibrium, r: f64, w: Complex64) -> Result<Complex64> {
    let k = eval_k_in_strip(eq, w)?.k;
    let inv2 = 1.0 / (w * w);
    Ok(r * r * (k - inv2) / ((r * r - k) * (r * r - inv2)))
}

/// Number of zeros of `f` inside a closed polygon, by the argument principle
/// with adaptive refinement of every edge.
pub fn count_zeros<F>(f: F, vertices: &[Complex64]) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    const BUDGET: usize = 200_000;
    let mut total = 0.0;
    let mut evaluations = 0usize;
    for (i, &a) in vertices.iter().enumerate() {
        let b = vertices[(i + 1) % vertices.len()];
        let mut left = (0.0, f(a)?);
        let mut stack = vec![(1.0, f(b)?)];
        while let Some(&top) = stack.last() {
            let ratio = top.1 / left.1;
            let small_step = (top.1 - left.1).norm() < 0.3 * left.1.norm().min(top.1.norm());
            if small_step && ratio.arg().abs() < PI / 6.0 {
                total += ratio.arg();
                left = top;
                stack.pop();
                continue;
            }
            evaluations += 1;
            if evaluations > BUDGET || top.0 - left.0 < 1e-12 {
                return Err(Error::UnderResolvedCurve { x: (a + (b - a) * left.0).re });
            }
            let t = 0.5 * (left.0 + top.0);
            stack.push((t, f(a + (b - a) * t)?));
        }
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Shifted-line evaluation at high frequency, along `Im w = γ₀`.
#[derive(Debug, Clone)]
pub struct HighFrequencyContour<'a> {
    eq: &'a RadialEquilibrium,
    pub xi_abs: f64,
    pub gamma0: f64,
    pub envelope_constant: Option<f64>,
}

/// Half-height of the zero-count rectangle below the real axis.
fn lower_margin(eq: &RadialEquilibrium) -> f64 {
    0.25 * eq.theta()
}

fn high_zero_count(eq: &RadialEquilibrium, r: f64, gamma: f64) -> Result<i64> {
    let x = 20.0 * (1.0 + 1.0 / r);
    let lo = -lower_margin(eq);
    let rect = [
        Complex64::new(-x, lo),
        Complex64::new(x, lo),
        Complex64::new(x, gamma),
        Complex64::new(-x, gamma),
    ];
    count_zeros(|w| Ok(r * r - eval_k_in_strip(eq, w)?.k), &rect)
}

/// Largest `γ₀ ≤ 0.9ϑ` for which `r² - k` has no zero in `0 ≤ Im w ≤ γ₀`,
/// found by bisection on the zero count and backed off by a quarter.
pub fn bisect_gamma0(eq: &RadialEquilibrium, r: f64) -> Result<f64> {
    let hi = 0.9 * eq.theta();
    if high_zero_count(eq, r, hi)? == 0 {
        return Ok(hi);
    }
    let (mut lo, mut up) = (0.0, hi);
    for _ in 0..30 {
        let mid = 0.5 * (lo + up);
        if high_zero_count(eq, r, mid)? == 0 {
            lo = mid;
        } else {
            up = mid;
        }
    }
    if lo <= 0.0 {
        return Err(Error::ContourTooHigh { zeros: high_zero_count(eq, r, up)? });
    }
    Ok(0.75 * lo)
}

impl<'a> HighFrequencyContour<'a> {
    /// With `gamma0 = None` the height comes from [`bisect_gamma0`]; an
    /// explicit height is validated by the zero count.
    pub fn new(eq: &'a RadialEquilibrium, xi_abs: f64, gamma0: Option<f64>) -> Result<Self> {
        check_args(xi_abs, 0.0)?;
        let gamma0 = match gamma0 {
            Some(g) => {
                if !(g >= 0.0 && g < eq.theta()) {
                    return Err(Error::InvalidArgument(format!("gamma0 = {g} outside [0, {})", eq.theta())));
                }
                let zeros = high_zero_count(eq, xi_abs, g.max(1e-3 * eq.theta()))?;
                if zeros != 0 {
                    return Err(Error::ContourTooHigh { zeros });
                }
                g
            }
            None => bisect_gamma0(eq, xi_abs)?,
        };
        Ok(Self { eq, xi_abs, gamma0, envelope_constant: None })
    }

    pub fn with_envelope_constant(mut self, c: f64) -> Self {
        self.envelope_constant = Some(c);
        self
    }

    pub fn eval(&self, tau: f64) -> Result<GreensValue> {
        check_args(self.xi_abs, tau)?;
        if self.gamma0 == 0.0 {
            // The subtracted kernel has poles at ±1/r on the real axis.
            return greens_real_line(self.eq, self.xi_abs, tau);
        }
        let r = self.xi_abs;
        let g = self.gamma0;
        let err = std::cell::RefCell::new(None);
        let f = |w: Complex64| {
            match subtracted_kernel(self.eq, r, w) {
                Ok(q) => q * (Complex64::i() * w * tau * r).exp(),
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        };
        let path = |x: f64| (Complex64::new(x, g), Complex64::new(1.0, 0.0));
        let tilt = Complex64::new(1.0, 0.5 * self.eq.theta());
        let integral = integrate_contour(f, path, 1.0_f64.max(1.0 / r), tilt, &line_config(self.eq))?;
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        let v = GreensValue::new(r, tau, r / (2.0 * PI) * integral, None);
        if let Some(c) = self.envelope_constant {
            let ratio = self.envelope_ratio(&v);
            if ratio > c {
                return Err(Error::EnvelopeViolation { xi_abs: r, tau, ratio, constant: c });
            }
        }
        Ok(v)
    }

    /// `|smooth| e^{γ₀τr} r`.
    pub fn envelope_ratio(&self, v: &GreensValue) -> f64 {
        v.smooth.abs() * (self.gamma0 * v.tau * self.xi_abs).exp() * self.xi_abs
    }
}

pub fn greens_contour_high(eq: &RadialEquilibrium, xi_abs: f64, tau: f64, gamma0: Option<f64>) -> Result<GreensValue> {
    HighFrequencyContour::new(eq, xi_abs, gamma0)?.eval(tau)
}

/// Ray evaluation at low frequency: `Γ⁻_{γ₁} ∪ Γ⁺_{γ₁}` plus the residues at
/// `ζ(r)` and `-conj ζ(r)`.
#[derive(Debug, Clone)]
pub struct LowFrequencyContour<'a> {
    eq: &'a RadialEquilibrium,
    pub point: DispersionPoint,
    pub gamma1: f64,
    pub envelope_constant: Option<f64>,
}

fn low_zero_count(eq: &RadialEquilibrium, r: f64, gamma: f64) -> Result<i64> {
    let x = 20.0 / r;
    let h = gamma * (1.0 + x);
    let poly = [
        Complex64::new(-x, -h),
        Complex64::new(0.0, -gamma),
        Complex64::new(x, -h),
        Complex64::new(x, h),
        Complex64::new(0.0, gamma),
        Complex64::new(-x, h),
    ];
    count_zeros(|w| Ok(r * r - eval_k_in_strip(eq, w)?.k), &poly)
}

/// Default ray parameter: `ϑ'/4`, raised when needed so that `ζ(r)` lies
/// well inside `𝒟_{γ₁}`.
pub fn default_gamma1(eq: &RadialEquilibrium, point: &DispersionPoint) -> Result<f64> {
    let z = point.zeta;
    let needed = z.im / (1.0 + z.re.abs());
    let cap = 0.9 * eq.theta();
    let g = (0.25 * eq.theta_prime()).max(2.0 * needed);
    if g < cap {
        return Ok(g);
    }
    if 1.2 * needed < cap {
        return Ok(cap);
    }
    Err(Error::InvalidArgument(format!(
        "zero {z} lies too close to the strip boundary for a ray contour"
    )))
}

impl<'a> LowFrequencyContour<'a> {
    pub fn new(eq: &'a RadialEquilibrium, xi_abs: f64) -> Result<Self> {
        check_args(xi_abs, 0.0)?;
        let point = solve_zeta(eq, xi_abs).map_err(|_| Error::MissingDispersionPoint { r: xi_abs })?;
        Self::with_point(eq, point, None)
    }

    /// Uses a precomputed dispersion point and optionally a fixed `γ₁`; the
    /// region between the rays must contain exactly the two zeros.
    pub fn with_point(eq: &'a RadialEquilibrium, point: DispersionPoint, gamma1: Option<f64>) -> Result<Self> {
        let gamma1 = match gamma1 {
            Some(g) => g,
            None => default_gamma1(eq, &point)?,
        };
        if !(gamma1 > 0.0 && gamma1 < eq.theta()) {
            return Err(Error::InvalidArgument(format!("gamma1 = {gamma1} outside (0, {})", eq.theta())));
        }
        let zeros = low_zero_count(eq, point.r, gamma1)?;
        if zeros != 2 {
            return Err(Error::ContourTooHigh { zeros });
        }
        Ok(Self { eq, point, gamma1, envelope_constant: None })
    }

    pub fn with_envelope_constant(mut self, c: f64) -> Self {
        self.envelope_constant = Some(c);
        self
    }

    pub fn xi_abs(&self) -> f64 {
        self.point.r
    }

    /// `Re{i(1 + 𝔪_l) e^{iτω}}`.
    pub fn oscillatory(&self, tau: f64) -> f64 {
        (Complex64::i() * (1.0 + self.point.m_l) * (Complex64::i() * tau * self.point.omega).exp()).re
    }

    /// The ray integral `I₁(r,τ)`.
    pub fn ray_integral(&self, tau: f64) -> Result<Complex64> {
        let r = self.point.r;
        let g = self.gamma1;
        let err = std::cell::RefCell::new(None);
        let f = |w: Complex64| {
            match subtracted_kernel(self.eq, r, w) {
                Ok(q) => q * (Complex64::i() * w * tau * r).exp(),
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        };
        let path = |x: f64| (Complex64::new(x, g * (1.0 + x.abs())), Complex64::new(1.0, g * x.signum()));
        let integral = integrate_contour(f, path, 1.0 / r, Complex64::new(1.0, g), &line_config(self.eq))?;
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        Ok(r / (2.0 * PI) * integral)
    }

    pub fn eval(&self, tau: f64) -> Result<GreensValue> {
        check_args(self.point.r, tau)?;
        let error = self.ray_integral(tau)?;
        let oscillatory = self.oscillatory(tau);
        let v = GreensValue::new(
            self.point.r,
            tau,
            error + oscillatory,
            Some(Decomposition { oscillatory, error: error.re }),
        );
        if let Some(c) = self.envelope_constant {
            let ratio = self.envelope_ratio(&v, false);
            if ratio > c {
                return Err(Error::EnvelopeViolation { xi_abs: self.point.r, tau, ratio, constant: c });
            }
        }
        Ok(v)
    }

    /// `|error| e^{γ₁τr}` divided by `r² log(1/r) + r^{d-1}`, or by
    /// `r^{d-1} + r³` when `thin_tail` is set.
    pub fn envelope_ratio(&self, v: &GreensValue, thin_tail: bool) -> f64 {
        let r = self.point.r;
        let d = self.eq.decay_order();
        let error = v.decomposition.map_or(0.0, |dc| dc.error.abs());
        let env = if thin_tail && self.eq.tail_class() == TailClass::ThinTail {
            r.powf(d - 1.0) + r.powi(3)
        } else {
            r * r * (1.0 / r).ln() + r.powf(d - 1.0)
        };
        error * (self.gamma1 * v.tau * r).exp() / env
    }
}

pub fn greens_contour_low(eq: &RadialEquilibrium, xi_abs: f64, tau: f64) -> Result<GreensValue> {
    LowFrequencyContour::new(eq, xi_abs)?.eval(tau)
}

/// Direct quadrature along the real axis, subtracting `1/(r²(w+i)²)`, which
/// has vanishing integral against `e^{iwτr}` for `τ ≥ 0`; the tails leave
/// the axis into the strip. Suited to
/// frequencies where `r² - k` stays away from zero on the real line.
pub fn greens_real_line(eq: &RadialEquilibrium, xi_abs: f64, tau: f64) -> Result<GreensValue> {
    check_args(xi_abs, tau)?;
    let r = xi_abs;
    let err = std::cell::RefCell::new(None);
    let f = |w: Complex64| {
        match eval_k_in_strip(eq, w) {
            Ok(kv) => {
                let s = 1.0 / (r * r * (w + Complex64::i()).powi(2));
                (kv.k / (r * r - kv.k) - s) * (Complex64::i() * w * tau * r).exp()
            }
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let path = |x: f64| (Complex64::new(x, 0.0), Complex64::new(1.0, 0.0));
    let tilt = Complex64::new(1.0, 0.5 * eq.theta());
    let integral = integrate_contour(f, path, 1.0_f64.max(1.0 / r), tilt, &line_config(eq))?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(GreensValue::new(r, tau, r / (2.0 * PI) * integral, None))
}

/// Smooth test function for the normal-form identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    Zero,
    Gaussian { center: f64, width: f64 },
}

impl TestFunction {
    fn value(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Zero => 0.0,
            TestFunction::Gaussian { center, width } => (-((t - center) / width).powi(2)).exp(),
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Zero => 0.0,
            TestFunction::Gaussian { center, width } => -2.0 * (t - center) / (width * width) * self.value(t),
        }
    }

    fn support_end(&self) -> f64 {
        match *self {
            TestFunction::Zero => 1.0,
            TestFunction::Gaussian { center, width } => center.max(0.0) + 12.0 * width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalFormRow {
    pub phi: TestFunction,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalFormReport {
    pub xi_abs: f64,
    pub rows: Vec<NormalFormRow>,
    pub max_difference: f64,
}

pub const NORMAL_FORM_TOL: f64 = 1e-8;

/// For the Poisson equilibrium, checks
/// `⟨Ĝ, φ⟩ = φ(0) + ∫₀^∞ smooth·φ = -∫₀^∞ e^{-rτ} cos τ [φ' - rφ] dτ`
/// for unit Gaussian bumps centred on each grid point.
pub fn normal_form_identity_check(xi_abs: f64, tau_grid: &[f64]) -> Result<NormalFormReport> {
    let phis: Vec<TestFunction> = tau_grid.iter().map(|&c| TestFunction::Gaussian { center: c, width: 1.0 }).collect();
    normal_form_identity_with(xi_abs, &phis)
}

pub fn normal_form_identity_with(xi_abs: f64, phis: &[TestFunction]) -> Result<NormalFormReport> {
    check_args(xi_abs, 0.0)?;
    let r = xi_abs;
    let poles = poisson_kernels::poles_j1(r)?;
    let cfg = QuadConfig::tight();
    let mut rows = Vec::with_capacity(phis.len());
    let mut max_difference: f64 = 0.0;
    for phi in phis {
        let end = phi.support_end();
        let bp: Vec<f64> = (0..=64).map(|i| end * i as f64 / 64.0).collect();
        let pairing = quadrature::integrate_real(|t| closed_form_from(&poles, t).smooth * phi.value(t), &bp, &cfg)?;
        let lhs = phi.value(0.0) + pairing;
        let rhs = -quadrature::integrate_real(
            |t| (-r * t).exp() * t.cos() * (phi.derivative(t) - r * phi.value(t)),
            &bp,
            &cfg,
        )?;
        max_difference = max_difference.max((lhs - rhs).abs());
        if (lhs - rhs).abs() > NORMAL_FORM_TOL {
            return Err(Error::IdentityViolation { lhs, rhs });
        }
        rows.push(NormalFormRow { phi: *phi, lhs, rhs });
    }
    Ok(NormalFormReport { xi_abs, rows, max_difference })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(j: u32) -> RadialEquilibrium {
        RadialEquilibrium::generalized_poisson(j).unwrap()
    }

    #[test]
    fn poisson_closed_form() {
        let v = greens_closed_form(1, 1.0, PI / 2.0).unwrap();
        assert!((v.smooth + (-PI / 2.0).exp()).abs() < 1e-14);
        assert_eq!(v.delta_coeff, 1.0);
        assert!(greens_closed_form(1, 0.3, 0.0).unwrap().smooth.abs() < 1e-15);
        let d = v.decomposition.unwrap();
        assert_eq!(d.error, 0.0);
    }

    #[test]
    fn decomposition_sums() {
        for j in [2, 3] {
            let v = greens_closed_form(j, 0.1, 5.0).unwrap();
            let d = v.decomposition.unwrap();
            assert!((d.oscillatory + d.error - v.smooth).abs() < 1e-12);
            assert!(v.imag.abs() < 1e-12);
        }
    }

    #[test]
    fn high_frequency_matches_poisson() {
        let eq = gp(1);
        let c = HighFrequencyContour::new(&eq, 1.0, None).unwrap();
        assert!(c.gamma0 > 0.0);
        let v = c.eval(3.0).unwrap();
        assert!((v.smooth + (-3.0f64).exp() * 3.0f64.sin()).abs() < 1e-8, "{}", v.smooth);
        let v0 = HighFrequencyContour::new(&eq, 1.0, Some(0.0)).unwrap().eval(0.0).unwrap();
        assert!(v0.smooth.abs() < 1e-9 && v0.imag.abs() < 1e-9);
    }

    #[test]
    fn low_frequency_poisson_cancels() {
        let eq = gp(1);
        let v = greens_contour_low(&eq, 0.2, 4.0).unwrap();
        let d = v.decomposition.unwrap();
        assert!(d.error.abs() < 1e-9, "{}", d.error);
        assert!((v.smooth + (-0.8f64).exp() * 4.0f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn low_frequency_matches_gp2() {
        let eq = gp(2);
        let c = LowFrequencyContour::new(&eq, 0.05).unwrap();
        for tau in [0.0, 1.0, 5.0, 10.0] {
            let v = c.eval(tau).unwrap();
            let exact = greens_closed_form(2, 0.05, tau).unwrap();
            assert!((v.smooth - exact.smooth).abs() < 1e-8, "tau={tau}: {} vs {}", v.smooth, exact.smooth);
            let osc = v.decomposition.unwrap().oscillatory;
            assert!((osc - exact.decomposition.unwrap().oscillatory).abs() < 1e-8);
        }
    }

    #[test]
    fn real_line_matches_closed_form() {
        for j in [1, 2] {
            for tau in [0.0, 0.5, 7.0] {
                let v = greens_real_line(&gp(j), 1.0, tau).unwrap();
                let exact = greens_closed_form(j, 1.0, tau).unwrap();
                assert!((v.smooth - exact.smooth).abs() < 1e-8, "j={j} tau={tau}: {} vs {}", v.smooth, exact.smooth);
            }
        }
    }

    #[test]
    fn normal_form() {
        let rep = normal_form_identity_check(1.0, &[0.0, 2.0, 5.0]).unwrap();
        assert!(rep.max_difference < 1e-8);
        let rep = normal_form_identity_with(0.3, &[TestFunction::Gaussian { center: 3.0, width: 0.7 }, TestFunction::Zero]).unwrap();
        assert_eq!(rep.rows[1].lhs, 0.0);
        assert_eq!(rep.rows[1].rhs, 0.0);
    }

    #[test]
    fn zero_counts() {
        let eq = gp(1);
        // Zeros of r² - k₁ sit at ±1/r + i.
        assert_eq!(high_zero_count(&eq, 1.0, 0.4).unwrap(), 0);
        assert_eq!(low_zero_count(&eq, 0.1, 0.25).unwrap(), 2);
        assert_eq!(low_zero_count(&eq, 0.1, 0.05).unwrap(), 0);
    }
}
