//! Exact algebra for the generalized Poisson family `m_j ∝ (1+r²)^{-j}`.
//!
//! Two independent rational recursions produce the kernel coefficients
//! `a_p^{(j)}` and the Fourier polynomials `Q_j`; the pole sets of
//! `K_j/(1+K_j)` are computed in closed form for `j = 1, 2, 3` and by
//! simultaneous iteration for general `j`, always in the coordinate
//! `ζ = |ξ| + iθ`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyroots;

/// Coefficients of `K_j(ξ,θ) = -z^{-2} Σ_p a_p (|ξ|/(iz))^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct KjCoefficients {
    pub j: u32,
    pub a: Vec<BigRational>,
    /// `N^{(j)}`; set to one for `j = 1`, where the recursion starts.
    pub n: BigRational,
}

impl KjCoefficients {
    pub fn a_f64(&self) -> Vec<f64> {
        self.a.iter().map(rat_to_f64).collect()
    }

    /// `a_2^{(j)}`, zero when `j < 3`.
    pub fn a2(&self) -> f64 {
        self.a.get(2).map(rat_to_f64).unwrap_or(0.0)
    }
}

/// `Q_j(x) = Σ_p d_p x^p`, with `m̂_j(s) = Q_j(|s|) e^{-|s|} / Q_j(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QjPolynomial {
    pub j: u32,
    pub d: Vec<BigRational>,
}

impl QjPolynomial {
    pub fn value_at_zero(&self) -> &BigRational {
        &self.d[0]
    }

    /// Coefficients normalized so that the constant term is one.
    pub fn normalized_f64(&self) -> Vec<f64> {
        self.d.iter().map(|d| rat_to_f64(&(d / &self.d[0]))).collect()
    }

    /// Kernel coefficients implied by this polynomial: `(p+1)! d_p / d_0`.
    pub fn implied_kernel_coefficients(&self) -> Vec<BigRational> {
        let mut fact = BigInt::one();
        self.d
            .iter()
            .enumerate()
            .map(|(p, d)| {
                fact *= BigInt::from(p as u64 + 1);
                BigRational::from_integer(fact.clone()) * d / &self.d[0]
            })
            .collect()
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow2(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << k)
}

fn factorial(k: usize) -> BigRational {
    BigRational::from_integer((1..=k as u64).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn kj_coefficients(j: u32) -> Result<KjCoefficients> {
    if j == 0 {
        return Err(Error::InvalidArgument("generalized Poisson index must be >= 1".into()));
    }
    let mut a = vec![BigRational::one()];
    let mut n = BigRational::one();
    for jj in 1..j as usize {
        // a currently holds a^{(jj)}, of length jj.
        let terms: Vec<BigRational> = (0..jj).map(|k| &a[k] / (pow2(k) * rat(k as i64 + 1, 1))).collect();
        n = terms.iter().fold(BigRational::zero(), |s, t| s + t);
        let mut next = vec![BigRational::one()];
        for p in 1..=jj {
            let tail = terms[p - 1..].iter().fold(BigRational::zero(), |s, t| s + t);
            // (p+1) 2^{p-1}
            let pre = rat(p as i64 + 1, 1) * pow2(p - 1);
            next.push(pre * tail / &n);
        }
        a = next;
    }
    Ok(KjCoefficients { j, a, n })
}

pub fn qj_polynomial(j: u32) -> Result<QjPolynomial> {
    if j == 0 {
        return Err(Error::InvalidArgument("generalized Poisson index must be >= 1".into()));
    }
    let mut d = vec![BigRational::one()];
    for jj in 1..j as usize {
        let mut next = Vec::with_capacity(jj + 1);
        let d0 = (0..jj).fold(BigRational::zero(), |s, k| s + factorial(k) / pow2(k) * &d[k]);
        next.push(d0);
        for p in 1..=jj {
            let sum = (p - 1..jj).fold(BigRational::zero(), |s, k| s + factorial(k) / pow2(k + 1) * &d[k]);
            next.push(pow2(p) / factorial(p) * sum);
        }
        d = next;
    }
    Ok(QjPolynomial { j, d })
}

/// Relative roundoff allowance in [`PoleSet::check_stability`].
pub const STABILITY_SLACK: f64 = 8.0 * f64::EPSILON;

/// Closed-form parameters attached to a pole set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PoleParams {
    Poisson,
    Quadratic { rho: f64, kappa: f64, alpha: f64, beta: f64 },
    Cubic { rho: f64, kappa1: f64, kappa3: f64, a: f64, b: f64, c: f64, d: f64 },
    Numerical { branch_expansion_residual: f64, max_root_ratio: f64 },
}

/// Roots of the pole polynomial in `ζ`, with partial-fraction coefficients
/// of `N(ζ)/Q(ζ) = Σ_k c_k / (ζ - r_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleSet {
    pub j: u32,
    pub xi_abs: f64,
    pub roots: Vec<Complex64>,
    pub residues: Vec<Complex64>,
    pub params: PoleParams,
}

impl PoleSet {
    /// The root bifurcating from `ζ = i`: largest imaginary part.
    pub fn branch_root(&self) -> Complex64 {
        *self
            .roots
            .iter()
            .max_by(|a, b| a.im.total_cmp(&b.im))
            .expect("pole sets are never empty")
    }

    /// Poles in the `θ` variable, `θ = -i(ζ - |ξ|)`.
    pub fn theta_poles(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| -Complex64::i() * (r - self.xi_abs)).collect()
    }

    /// Frequency `ω = θ` of the branch root; for `j = 1` this is `1 + i|ξ|`.
    pub fn branch_omega(&self) -> Complex64 {
        -Complex64::i() * (self.branch_root() - self.xi_abs)
    }

    /// Smooth part of `Ĝ_j(ξ,τ)` by residues, `-Σ_k c_k e^{(r_k-|ξ|)τ}`.
    pub fn greens_smooth(&self, tau: f64) -> Complex64 {
        self.roots
            .iter()
            .zip(&self.residues)
            .map(|(r, c)| -c * ((r - self.xi_abs) * tau).exp())
            .sum()
    }

    pub fn max_root_ratio(&self) -> f64 {
        let top = self.branch_root();
        self.roots
            .iter()
            .filter(|r| **r != top && r.im > -0.5)
            .filter(|r| (*r - top.conj()).norm() > 1e-9)
            .map(|r| r.norm() / self.xi_abs)
            .fold(0.0, f64::max)
    }

    /// Fails with `StabilityViolation` if some root has `Re ζ > |ξ|` beyond
    /// roundoff. For large `j` the branch root satisfies
    /// `|ξ| - Re ζ = O(|ξ|^{2j-1})`, which double precision cannot resolve.
    pub fn check_stability(&self) -> Result<()> {
        for r in &self.roots {
            if r.re - self.xi_abs > STABILITY_SLACK * r.norm().max(self.xi_abs) {
                return Err(Error::StabilityViolation { root: *r, xi_abs: self.xi_abs });
            }
        }
        Ok(())
    }
}

fn pole_polynomial(a: &[f64], xi: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let j = a.len();
    // Q(ζ) = ζ^{j+1} + Σ_p a_p ξ^p ζ^{j-1-p}; highest degree first.
    let mut q = vec![Complex64::new(0.0, 0.0); j + 2];
    q[0] = Complex64::new(1.0, 0.0);
    let mut n = vec![Complex64::new(0.0, 0.0); j];
    for (p, ap) in a.iter().enumerate() {
        let c = ap * xi.powi(p as i32);
        q[2 + p] = Complex64::new(c, 0.0);
        n[p] = Complex64::new(c, 0.0);
    }
    (q, n)
}

fn residues_at(q: &[Complex64], n: &[Complex64], roots: &[Complex64]) -> Vec<Complex64> {
    roots
        .iter()
        .map(|&r| {
            let (_, dq) = polyroots::horner(q, r);
            polyroots::horner(n, r).0 / dq
        })
        .collect()
}

fn check_xi(xi_abs: f64) -> Result<()> {
    if !(xi_abs > 0.0 && xi_abs.is_finite()) {
        return Err(Error::InvalidArgument(format!("|xi| must be positive and finite, got {xi_abs}")));
    }
    Ok(())
}

/// Exact poles for the Poisson equilibrium: `ζ = ±i`.
pub fn poles_j1(xi_abs: f64) -> Result<PoleSet> {
    check_xi(xi_abs)?;
    let i = Complex64::i();
    Ok(PoleSet {
        j: 1,
        xi_abs,
        roots: vec![i, -i],
        residues: vec![-0.5 * i, 0.5 * i],
        params: PoleParams::Poisson,
    })
}

/// Monotone increasing `f` on `[lo, hi]`: bisection to `1e-14` relative
/// width followed by Newton polish.
fn solve_monotone(f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo).0, f(hi).0);
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::BracketFailure { lo, hi });
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid).0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..2 {
        let (v, dv) = f(x);
        if dv != 0.0 {
            x -= v / dv;
        }
    }
    Ok(x)
}

/// Poles for `j = 2` from the symmetric-function identities.
pub fn poles_j2(xi_abs: f64) -> Result<PoleSet> {
    check_xi(xi_abs)?;
    let xi = xi_abs;
    let upper = (2.0 * xi).max(xi.cbrt());
    let rho = solve_monotone(|r| (r + 4.0 * r.powi(3) - xi, 1.0 + 12.0 * r * r), 0.0, upper)?;
    let kappa = (1.0 + 3.0 * rho * rho).sqrt();
    let alpha = -4.0 * rho.powi(3) / (1.0 + 12.0 * rho * rho);
    let beta = -(1.0 + 24.0 * rho.powi(4) / (1.0 + 12.0 * rho * rho)) / (2.0 * kappa);
    let roots = vec![
        Complex64::new(rho, kappa),
        Complex64::new(rho, -kappa),
        Complex64::new(-2.0 * rho, 0.0),
    ];
    let residues = vec![
        Complex64::new(alpha, beta),
        Complex64::new(alpha, -beta),
        Complex64::new(-2.0 * alpha, 0.0),
    ];
    Ok(PoleSet { j: 2, xi_abs, roots, residues, params: PoleParams::Quadratic { rho, kappa, alpha, beta } })
}

/// Poles for `j = 3` from the sextic in `ρ` and the partial-fraction
/// identities. Small differences such as `ρ - |ξ|` are evaluated in
/// cancellation-free form.
pub fn poles_j3(xi_abs: f64) -> Result<PoleSet> {
    check_xi(xi_abs)?;
    let xi = xi_abs;
    let sextic = |r: f64| {
        let r2 = r * r;
        let v = 16.0 * r2 * r2 * r2 + 8.0 * r2 * r2 + r2 * (1.0 - 8.0 * xi * xi) - xi * xi;
        let dv = 96.0 * r2 * r2 * r + 32.0 * r2 * r + 2.0 * r * (1.0 - 8.0 * xi * xi);
        (v, dv)
    };
    let rho = solve_monotone(sextic, 0.0, 2.0 * xi)?;
    let s = xi / rho;
    // ρ - |ξ| = -16ρ⁵ / (1 + |ξ|/ρ + 8ρ(ρ+|ξ|))
    let rho_minus_xi = -16.0 * rho.powi(5) / (1.0 + s + 8.0 * rho * (rho + xi));
    let kappa1 = (0.5 * (1.0 + 2.0 * rho * rho + s)).sqrt();
    let two_k3_sq = (8.0 * xi * xi - 4.0 * rho * rho - 12.0 * rho.powi(4)) / (1.0 + 2.0 * rho * rho + s);
    if !(two_k3_sq > 0.0) {
        return Err(Error::BracketFailure { lo: 0.0, hi: 2.0 * xi });
    }
    let kappa3 = (0.5 * two_k3_sq).sqrt();
    let rho2_minus_xi2 = rho_minus_xi * (rho + xi);
    let a = rho * (1.0 + 4.0 * rho * rho) * rho2_minus_xi2 / (8.0 * rho.powi(4) * (1.0 + 4.0 * rho * rho) + xi * xi);
    let c = -a;
    let b = (-0.25 + a * rho - xi / (4.0 * rho) - a * xi / (4.0 * rho * rho)) / kappa1;
    // -1/4 + |ξ|/(4ρ) = -(ρ - |ξ|)/(4ρ)
    let d = (-rho_minus_xi / (4.0 * rho) + a * rho + a * xi / (4.0 * rho * rho)) / kappa3;
    let roots = vec![
        Complex64::new(rho, kappa1),
        Complex64::new(rho, -kappa1),
        Complex64::new(-rho, kappa3),
        Complex64::new(-rho, -kappa3),
    ];
    let residues = vec![
        Complex64::new(a, b),
        Complex64::new(a, -b),
        Complex64::new(c, d),
        Complex64::new(c, -d),
    ];
    Ok(PoleSet { j: 3, xi_abs, roots, residues, params: PoleParams::Cubic { rho, kappa1, kappa3, a, b, c, d } })
}

/// Default upper end of the small-|ξ| regime for [`poles_general`].
pub const DEFAULT_POLE_R0: f64 = 0.05;

/// Predicted branch root `|ξ| + i(1 + (3 - a_2)|ξ|²/2)`.
pub fn branch_root_expansion(a2: f64, xi_abs: f64) -> Complex64 {
    Complex64::new(xi_abs, 1.0 + 0.5 * (3.0 - a2) * xi_abs * xi_abs)
}

/// Numerical poles for general `j` in the small-|ξ| regime `|ξ| ≤ r0`.
pub fn poles_general(j: u32, xi_abs: f64) -> Result<PoleSet> {
    poles_general_with(j, xi_abs, DEFAULT_POLE_R0)
}

pub fn poles_general_with(j: u32, xi_abs: f64, r0: f64) -> Result<PoleSet> {
    check_xi(xi_abs)?;
    if xi_abs > r0 {
        return Err(Error::InvalidArgument(format!("|xi| = {xi_abs} exceeds the small-frequency bound {r0}")));
    }
    poles_numerical(j, xi_abs)
}

/// Numerical poles for any `|ξ| > 0`, without the small-|ξ| restriction.
pub fn poles_numerical(j: u32, xi_abs: f64) -> Result<PoleSet> {
    check_xi(xi_abs)?;
    let coeffs = kj_coefficients(j)?;
    let a = coeffs.a_f64();
    let (q, n) = pole_polynomial(&a, xi_abs);
    let roots = polyroots::aberth(&q)?;
    if roots.len() != j as usize + 1 {
        return Err(Error::RootCountMismatch { expected: j as usize + 1, found: roots.len() });
    }
    let scale: f64 = q.iter().map(|c| c.norm()).sum();
    for r in &roots {
        let (v, _) = polyroots::horner(&q, *r);
        if v.norm() > 1e-12 * scale * r.norm().max(1.0).powi(j as i32 + 1) {
            return Err(Error::RootCountMismatch { expected: j as usize + 1, found: j as usize });
        }
    }
    let residues = residues_at(&q, &n, &roots);
    let mut set = PoleSet {
        j,
        xi_abs,
        roots,
        residues,
        params: PoleParams::Numerical { branch_expansion_residual: 0.0, max_root_ratio: 0.0 },
    };
    set.check_stability()?;
    let residual = (set.branch_root() - branch_root_expansion(coeffs.a2(), xi_abs)).norm();
    set.params = PoleParams::Numerical { branch_expansion_residual: residual, max_root_ratio: set.max_root_ratio() };
    Ok(set)
}

/// Closed form where available (`j ≤ 3`), numerical otherwise.
pub fn poles(j: u32, xi_abs: f64) -> Result<PoleSet> {
    match j {
        1 => poles_j1(xi_abs),
        2 => poles_j2(xi_abs),
        3 => poles_j3(xi_abs),
        _ => poles_numerical(j, xi_abs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[BigRational]) -> Vec<f64> {
        v.iter().map(rat_to_f64).collect()
    }

    #[test]
    fn first_kernels() {
        assert_eq!(ints(&kj_coefficients(1).unwrap().a), vec![1.0]);
        assert_eq!(ints(&kj_coefficients(2).unwrap().a), vec![1.0, 2.0]);
        assert_eq!(ints(&kj_coefficients(3).unwrap().a), vec![1.0, 2.0, 2.0]);
        assert!(kj_coefficients(0).is_err());
    }

    #[test]
    fn fourier_polynomials() {
        assert_eq!(ints(&qj_polynomial(2).unwrap().d), vec![1.0, 1.0]);
        assert_eq!(ints(&qj_polynomial(3).unwrap().d), vec![1.5, 1.5, 0.5]);
        for j in 2..8 {
            let q = qj_polynomial(j).unwrap();
            assert_eq!(q.d[0], q.d[1], "Q_j(0) = Q_j'(0) for j = {j}");
        }
    }

    #[test]
    fn recursions_agree_exactly() {
        for j in 1..=8 {
            let a = kj_coefficients(j).unwrap().a;
            let implied = qj_polynomial(j).unwrap().implied_kernel_coefficients();
            assert_eq!(a, implied, "j = {j}");
        }
    }

    #[test]
    fn coefficients_positive_and_a2_bounded() {
        for j in 1..=12 {
            let k = kj_coefficients(j).unwrap();
            assert!(k.a.iter().all(|x| x > &BigRational::zero()));
            assert!(k.a[0].is_one());
            let a2 = k.a2();
            assert!((0.0..3.0).contains(&a2), "j = {j}: a2 = {a2}");
        }
    }

    #[test]
    fn poisson_poles_give_unit_frequency() {
        let p = poles_j1(0.3).unwrap();
        assert!((p.branch_omega() - Complex64::new(1.0, 0.3)).norm() < 1e-15);
        let tau = 1.7;
        let g = p.greens_smooth(tau);
        assert!((g.re + (-0.3 * tau).exp() * tau.sin()).abs() < 1e-15);
        assert!(g.im.abs() < 1e-15);
    }

    #[test]
    fn j2_closed_form_matches_residues() {
        for xi in [0.01, 0.1, 0.7, 3.0] {
            let p = poles_j2(xi).unwrap();
            let PoleParams::Quadratic { rho, .. } = p.params else { panic!() };
            assert!((rho + 4.0 * rho.powi(3) - xi).abs() < 1e-14 * xi.max(1.0));
            let (q, n) = pole_polynomial(&[1.0, 2.0], xi);
            for (r, c) in p.roots.iter().zip(&p.residues) {
                assert!(polyroots::horner(&q, *r).0.norm() < 1e-12 * (1.0 + xi));
                let expect = residues_at(&q, &n, &[*r])[0];
                assert!((c - expect).norm() < 1e-12, "xi = {xi}: {c} vs {expect}");
            }
        }
    }

    #[test]
    fn j3_closed_form_matches_residues() {
        for xi in [0.005, 0.05, 0.2] {
            let p = poles_j3(xi).unwrap();
            let (q, n) = pole_polynomial(&[1.0, 2.0, 2.0], xi);
            for (r, c) in p.roots.iter().zip(&p.residues) {
                assert!(polyroots::horner(&q, *r).0.norm() < 1e-13);
                let expect = residues_at(&q, &n, &[*r])[0];
                assert!((c - expect).norm() < 1e-10 * (1.0 + expect.norm()), "xi = {xi}: {c} vs {expect}");
            }
            let PoleParams::Cubic { rho, kappa1, kappa3, .. } = p.params else { panic!() };
            assert!((2.0 * kappa1 * kappa1 - 2.0 * kappa3 * kappa3 - 2.0 * xi / rho).abs() < 1e-12);
        }
    }

    #[test]
    fn general_solver_reproduces_closed_forms() {
        for xi in [0.01, 0.05] {
            for j in [2, 3] {
                let closed = poles(j, xi).unwrap();
                let num = poles_general(j, xi).unwrap();
                for r in &closed.roots {
                    let best = num.roots.iter().map(|s| (s - r).norm()).fold(f64::INFINITY, f64::min);
                    assert!(best < 1e-10, "j = {j}, xi = {xi}");
                }
            }
        }
    }

    #[test]
    fn general_rejects_large_xi() {
        assert!(poles_general(4, 0.5).is_err());
        assert!(poles_j2(0.0).is_err());
        assert!(poles_j3(-1.0).is_err());
    }

    #[test]
    fn poles_stable_for_small_xi() {
        for j in 1..=8 {
            for xi in [0.01, 0.02, 0.05] {
                let p = poles_general(j, xi).unwrap();
                assert!(p.roots.iter().all(|r| r.re - xi <= STABILITY_SLACK * r.norm()));
                assert_eq!(p.roots.len(), j as usize + 1);
            }
        }
    }

    #[test]
    fn branch_root_expansion_j5() {
        let a2 = kj_coefficients(5).unwrap().a2();
        let p = poles_general(5, 0.02).unwrap();
        assert!((p.branch_root() - branch_root_expansion(a2, 0.02)).norm() < 1e-4);
    }
}
