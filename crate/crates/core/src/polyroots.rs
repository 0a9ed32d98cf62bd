//! Simultaneous polynomial root finding (Aberth–Ehrlich iteration).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Evaluates `p` (coefficients highest degree first) and its derivative at `z`.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of the polynomial with coefficients `coeffs`, highest degree
/// first. The leading coefficient must be nonzero.
pub fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[0];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidArgument("leading coefficient vanishes".into()));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    // Fujiwara-type bound for the initial circle.
    let radius = monic[1..]
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm().powf(1.0 / (k as f64 + 1.0)))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let mut converged = vec![false; n];
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                converged[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (k, zk) in z.iter().enumerate() {
                if k != i {
                    repulsion += 1.0 / (z[i] - zk);
                }
            }
            let step = ratio / (1.0 - ratio * repulsion);
            z[i] -= step;
            let rel = step.norm() / z[i].norm().max(1e-300);
            max_step = max_step.max(rel);
            if step.norm() <= 1e-16 * z[i].norm().max(radius * 1e-3) {
                converged[i] = true;
            }
        }
        if converged.iter().all(|&c| c) || max_step < 1e-16 {
            break;
        }
    }
    // Newton polish.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&monic, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            *zi -= p / dp;
        }
    }
    let scale: f64 = monic.iter().map(|c| c.norm()).sum();
    let residual_bad = z
        .iter()
        .filter(|&&zi| horner(&monic, zi).0.norm() > 1e-12 * scale * zi.norm().max(1.0).powi(n as i32))
        .count();
    if residual_bad > 0 {
        return Err(Error::RootCountMismatch { expected: n, found: n - residual_bad });
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_roots() {
        let mut r = aberth(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        r.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn recovers_prescribed_roots() {
        let roots = [c(0.5, 0.1), c(-1.0, 2.0), c(3.0, 0.0), c(0.01, -0.02), c(-0.02, 0.0)];
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, a) in coeffs.iter().enumerate() {
                next[k] += a;
                next[k + 1] -= a * r;
            }
            coeffs = next;
        }
        let found = aberth(&coeffs).unwrap();
        for r in roots {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "{r} missing");
        }
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(aberth(&[c(2.0, 0.0)]).unwrap().is_empty());
        assert!(aberth(&[c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }
}
