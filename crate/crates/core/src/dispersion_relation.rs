//! Low-frequency zeros of `r² - k(z)`, Penrose winding checks and the
//! dissipation bracket.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dispersion_function::{eval_k_in_strip, eval_k_prime};
use crate::equilibria::{EquilibriumKind, RadialEquilibrium, TailClass};
use crate::error::{Error, Result};
use crate::report::ExpansionReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenroseReport {
    /// `(x, k(x))` along the real axis, in increasing `x`.
    pub curve_samples: Vec<(f64, Complex64)>,
    pub winding_numbers: Vec<(f64, i64)>,
    pub stable: bool,
    pub no_probes: bool,
}

const PENROSE_INITIAL: usize = 256;
const PENROSE_BUDGET: usize = 200_000;

/// Winding number of `k(ℝ)`, closed through `k(±∞) = 0`, about each probe.
pub fn penrose_check(eq: &RadialEquilibrium, probes: &[f64]) -> Result<PenroseReport> {
    if let Some(p) = probes.iter().find(|p| !(**p > 0.0)) {
        return Err(Error::InvalidArgument(format!("probe {p} is not positive")));
    }
    let k_at = |s: f64| -> Result<Complex64> {
        if s.abs() >= FRAC_PI_2 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(eval_k_in_strip(eq, Complex64::new(s.tan(), 0.0))?.k)
    };
    let resolved = |a: Complex64, b: Complex64| {
        probes.iter().all(|&p| {
            let p = Complex64::new(p, 0.0);
            let dist = (a - p).norm().min((b - p).norm());
            (b - a).norm() < 0.1 * dist && ((b - p) / (a - p)).arg().abs() <= PI / 4.0
        })
    };

    // s = atan(x) on [-π/2, π/2]; refined by depth-first bisection.
    let mut curve: Vec<(f64, Complex64)> = Vec::new();
    let mut count = 0usize;
    let step = PI / PENROSE_INITIAL as f64;
    let mut left = (-FRAC_PI_2, k_at(-FRAC_PI_2)?);
    curve.push(left);
    for i in 1..=PENROSE_INITIAL {
        let s = -FRAC_PI_2 + step * i as f64;
        let right = (s, k_at(s.min(FRAC_PI_2))?);
        let mut stack = vec![right];
        while let Some(&top) = stack.last() {
            if resolved(left.1, top.1) {
                curve.push(top);
                left = top;
                stack.pop();
                continue;
            }
            count += 1;
            if count > PENROSE_BUDGET || (top.0 - left.0).abs() < 1e-13 {
                return Err(Error::UnderResolvedCurve { x: left.0.tan() });
            }
            let mid = 0.5 * (left.0 + top.0);
            stack.push((mid, k_at(mid)?));
        }
    }

    let winding_numbers: Vec<(f64, i64)> = probes
        .iter()
        .map(|&p| {
            let p = Complex64::new(p, 0.0);
            let total: f64 = curve.windows(2).map(|w| ((w[1].1 - p) / (w[0].1 - p)).arg()).sum();
            (p.re, (total / (2.0 * PI)).round() as i64)
        })
        .collect();
    let stable = winding_numbers.iter().all(|(_, n)| *n == 0);
    let curve_samples = curve
        .into_iter()
        .filter(|(s, _)| s.abs() < FRAC_PI_2)
        .map(|(s, k)| (s.tan(), k))
        .collect();
    Ok(PenroseReport { curve_samples, winding_numbers, stable, no_probes: probes.is_empty() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionPoint {
    pub r: f64,
    pub zeta: Complex64,
    pub omega: Complex64,
    pub m_l: Complex64,
    pub delta: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionConfig {
    /// Largest admissible `r`; `None` selects the per-kind default.
    pub r1: Option<f64>,
    pub step_tol: f64,
    pub max_iter: usize,
    pub residual_tol: f64,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self { r1: None, step_tol: 1e-14, max_iter: 100, residual_tol: 1e-12 }
    }
}

/// Default upper end of the fixed-point regime.
pub fn default_r1(eq: &RadialEquilibrium) -> f64 {
    match eq.kind() {
        EquilibriumKind::Maxwellian => 0.25,
        _ => 0.3,
    }
}

pub fn solve_zeta(eq: &RadialEquilibrium, r: f64) -> Result<DispersionPoint> {
    solve_zeta_with(eq, r, Complex64::new(0.0, 0.0), &DispersionConfig::default())
}

/// Iterates `δ ← [L((1+δ)/r) - δ²]/2` with `L(z) = z²k(z) - 1`, from `delta0`.
pub fn solve_zeta_with(eq: &RadialEquilibrium, r: f64, delta0: Complex64, cfg: &DispersionConfig) -> Result<DispersionPoint> {
    let r1 = cfg.r1.unwrap_or_else(|| default_r1(eq));
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("r = {r} must be positive")));
    }
    if r > r1 {
        return Err(Error::NoConvergence { r, last_step: f64::NAN });
    }
    // Quadrature-evaluated k carries noise near 1e-13.
    let step_tol = match eq.kind() {
        EquilibriumKind::Custom => cfg.step_tol.max(1e-12),
        _ => cfg.step_tol,
    };
    let big_l = |delta: Complex64| -> Result<Complex64> {
        let z = (1.0 + delta) / r;
        Ok(z * z * eval_k_in_strip(eq, z)?.k - 1.0)
    };
    let mut delta = delta0;
    let mut last_step = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let next = 0.5 * (big_l(delta)? - delta * delta);
        iterations += 1;
        last_step = (next - delta).norm();
        delta = next;
        if !last_step.is_finite() {
            break;
        }
        if last_step < step_tol {
            break;
        }
    }
    if !(last_step < step_tol) {
        return Err(Error::NoConvergence { r, last_step });
    }
    let zeta = (1.0 + delta) / r;
    let k = eval_k_in_strip(eq, zeta)?.k;
    let residual = (k - r * r).norm();
    if residual >= cfg.residual_tol {
        return Err(Error::ResidualTooLarge { r, residual, tolerance: cfg.residual_tol });
    }
    let dk = eval_k_prime(eq, zeta)?;
    let m_l = -2.0 * r * k / dk - 1.0;
    Ok(DispersionPoint { r, zeta, omega: r * zeta, m_l, delta, residual, iterations })
}

/// Solves at every `r`. With `warm_start` the grid is swept in order and each
/// point starts from its predecessor's `δ`; otherwise points run in parallel.
pub fn dispersion_sweep(eq: &RadialEquilibrium, rs: &[f64], cfg: &DispersionConfig, warm_start: bool) -> Vec<Result<DispersionPoint>> {
    if warm_start {
        // δ grows like r² at small r; rescale the previous solution.
        let mut prev: Option<(f64, Complex64)> = None;
        rs.iter()
            .map(|&r| {
                let start = prev.map_or(Complex64::new(0.0, 0.0), |(rp, d)| d * (r / rp).powi(2));
                let p = solve_zeta_with(eq, r, start, cfg);
                if let Ok(p) = &p {
                    prev = Some((r, p.delta));
                }
                p
            })
            .collect()
    } else {
        rs.par_iter().map(|&r| solve_zeta_with(eq, r, Complex64::new(0.0, 0.0), cfg)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipationBracket {
    pub r: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `ω₂(r)` against `[-π m₀'(ω₁/r)/(4r²), -π m₀'(ω₁/r)/r²]`.
pub fn dissipation_bracket(eq: &RadialEquilibrium, r: f64) -> Result<DissipationBracket> {
    let p = solve_zeta(eq, r)?;
    bracket_of(eq, &p)
}

pub fn bracket_of(eq: &RadialEquilibrium, p: &DispersionPoint) -> Result<DissipationBracket> {
    let r = p.r;
    let upper = -PI * eq.m0_prime_real(p.omega.re / r) / (r * r);
    let b = DissipationBracket { r, omega1: p.omega.re, omega2: p.omega.im, lower: 0.25 * upper, upper };
    if !(b.lower <= b.omega2 && b.omega2 <= b.upper) {
        return Err(Error::BracketViolation { r, omega2: b.omega2, lower: b.lower, upper: b.upper });
    }
    Ok(b)
}

/// Decay of `δ₂(r) = ω(r) - 1 - 3a₂r²/2`, measured against
/// `r^{d-1} + r⁴ log(1/r)`.
pub fn thin_tail_expansion_check(eq: &RadialEquilibrium, r_grid: &[f64]) -> Result<ExpansionReport> {
    if eq.tail_class() != TailClass::ThinTail {
        return Err(Error::TailClassMismatch { expected: TailClass::ThinTail.name(), found: eq.tail_class().name() });
    }
    if r_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let a2 = eq.variance().ok_or(Error::TailClassMismatch { expected: "finite variance", found: "infinite variance" })?;
    let mut samples = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let p = solve_zeta(eq, r)?;
        samples.push((r, (p.omega - 1.0 - 1.5 * a2 * r * r).norm()));
    }
    let d = eq.decay_order();
    Ok(ExpansionReport::from_samples(samples).with_envelope(|r| r.powf(d - 1.0) + r.powi(4) * (1.0 / r).ln()))
}

/// Smallest `|r² - k(z)| / (r² + |z|^{-2})` over samples of the boundaries of
/// `𝒟_{2γ}` and `𝒟_{γ/2}` with `|Re z| ≤ 4/r`.
pub fn annulus_lower_bound(eq: &RadialEquilibrium, r: f64, gamma: f64, samples: usize) -> Result<f64> {
    let x_max = 4.0 / r;
    let mut worst = f64::INFINITY;
    let per_curve = (samples / 4).max(2);
    for g in [2.0 * gamma, 0.5 * gamma] {
        for sign in [1.0, -1.0] {
            for i in 0..per_curve {
                let x = -x_max + 2.0 * x_max * i as f64 / (per_curve - 1) as f64;
                let z = Complex64::new(x, sign * g * (1.0 + x.abs()));
                let k = eval_k_in_strip(eq, z)?.k;
                let ratio = (r * r - k).norm() / (r * r + 1.0 / z.norm_sqr());
                worst = worst.min(ratio);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson_kernels;

    fn gp(j: u32) -> RadialEquilibrium {
        RadialEquilibrium::generalized_poisson(j).unwrap()
    }

    #[test]
    fn poisson_branch_is_exact() {
        for r in [0.01, 0.1, 0.3] {
            let p = solve_zeta(&gp(1), r).unwrap();
            assert!((p.omega - Complex64::new(1.0, r)).norm() < 1e-12);
            assert!(p.m_l.norm() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_pole_solvers() {
        for j in [2, 3] {
            for r in [0.02, 0.05, 0.1] {
                let p = solve_zeta(&gp(j), r).unwrap();
                let poles = poisson_kernels::poles(j, r).unwrap();
                assert!((p.omega - poles.branch_omega()).norm() < 1e-10, "j={j} r={r}: {} vs {}", p.omega, poles.branch_omega());
            }
        }
    }

    #[test]
    fn conjugate_zero_and_bracket() {
        let m = RadialEquilibrium::maxwellian();
        for eq in [m, gp(2)] {
            for r in [0.1, 0.2] {
                let p = solve_zeta(&eq, r).unwrap();
                let mirror = -p.zeta.conj();
                let res = (eval_k_in_strip(&eq, mirror).unwrap().k - r * r).norm();
                assert!(res < 1e-12);
                assert!(p.omega.im >= 0.0);
                dissipation_bracket(&eq, r).unwrap();
            }
        }
        let b = dissipation_bracket(&gp(1), 0.3).unwrap();
        assert!((b.omega2 - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_regime() {
        assert!(matches!(solve_zeta(&gp(1), 0.5), Err(Error::NoConvergence { .. })));
        assert!(matches!(solve_zeta(&gp(1), 0.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn warm_start_matches_cold() {
        let eq = RadialEquilibrium::maxwellian();
        let rs: Vec<f64> = (1..=10).map(|i| 0.02 * i as f64).collect();
        let cfg = DispersionConfig::default();
        let cold = dispersion_sweep(&eq, &rs, &cfg, false);
        let warm = dispersion_sweep(&eq, &rs, &cfg, true);
        let (mut n_cold, mut n_warm) = (0, 0);
        for (a, b) in cold.iter().zip(&warm) {
            let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
            assert!((a.omega - b.omega).norm() < 1e-13);
            n_cold += a.iterations;
            n_warm += b.iterations;
        }
        assert!(n_warm < n_cold, "{n_warm} vs {n_cold}");
    }

    #[test]
    fn penrose_stability() {
        let r = penrose_check(&gp(1), &[0.5, 1.0, 2.0]).unwrap();
        assert!(r.stable && !r.no_probes);
        let r = penrose_check(&RadialEquilibrium::maxwellian(), &[0.25, 1.0]).unwrap();
        assert!(r.stable);
        let r = penrose_check(&gp(1), &[]).unwrap();
        assert!(r.stable && r.no_probes);
        assert!(matches!(penrose_check(&gp(1), &[1.0, -0.5]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn thin_tail_checks() {
        let rep = thin_tail_expansion_check(&RadialEquilibrium::maxwellian(), &[0.2, 0.1, 0.05]).unwrap();
        assert!(rep.exponent.unwrap() >= 2.9, "{rep:?}");
        let rep = thin_tail_expansion_check(&gp(2), &[0.2, 0.1, 0.05]).unwrap();
        assert!(rep.exponent.unwrap() >= 1.9, "{rep:?}");
        assert!(matches!(thin_tail_expansion_check(&gp(1), &[0.1]), Err(Error::TailClassMismatch { .. })));
    }

    #[test]
    fn annulus_bound_is_positive() {
        let c = annulus_lower_bound(&RadialEquilibrium::maxwellian(), 0.05, 0.09, 100).unwrap();
        assert!(c > 0.0);
    }
}
