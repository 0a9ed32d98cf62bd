//! Per-mode Volterra equation
//! `ρ̂(t) + ∫₀ᵗ (t-s) m̂₀((t-s)|ξ|) ρ̂(s) ds = ĥ(t)`,
//! its Green's-function solution, free-streaming forcings and the two
//! normal-form representations for the Poisson equilibrium.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibria::RadialEquilibrium;
use crate::error::{Error, Result};
use crate::greens_function::greens_closed_form;
use crate::quadrature::{self, QuadConfig};
use crate::report;

/// Spatial factor `g(x)` of separable data, radial in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpatialProfile {
    Zero,
    /// `A exp(-|x|²/(2w²))`.
    Gaussian { amplitude: f64, width: f64 },
}

impl SpatialProfile {
    pub fn value(&self, x_abs: f64) -> f64 {
        match *self {
            SpatialProfile::Zero => 0.0,
            SpatialProfile::Gaussian { amplitude, width } => amplitude * (-x_abs * x_abs / (2.0 * width * width)).exp(),
        }
    }

    /// `ĝ(ξ) = ∫ g(x) e^{-ix·ξ} dx`.
    pub fn fourier(&self, xi_abs: f64) -> f64 {
        match *self {
            SpatialProfile::Zero => 0.0,
            SpatialProfile::Gaussian { amplitude, width } => {
                amplitude * (2.0 * PI * width * width).powf(1.5) * (-0.5 * width * width * xi_abs * xi_abs).exp()
            }
        }
    }

    /// Mean of `g` over the sphere of radius `y` centred at distance `rho`
    /// from the origin.
    fn shell_mean(&self, rho: f64, y: f64) -> f64 {
        match *self {
            SpatialProfile::Zero => 0.0,
            SpatialProfile::Gaussian { amplitude, width } => {
                let w2 = width * width;
                if rho * y < 1e-8 * w2 {
                    return self.value((rho * rho + y * y).sqrt());
                }
                let a = (-(rho - y).powi(2) / (2.0 * w2)).exp();
                let b = (-(rho + y).powi(2) / (2.0 * w2)).exp();
                amplitude * w2 * (a - b) / (2.0 * rho * y)
            }
        }
    }

    fn reach(&self) -> f64 {
        match *self {
            SpatialProfile::Zero => 1.0,
            SpatialProfile::Gaussian { width, .. } => 12.0 * width,
        }
    }
}

/// Velocity factor `q(|v|)` of separable data, a probability density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VelocityProfile {
    /// `(2πw²)^{-3/2} exp(-|v|²/(2w²))`.
    Gaussian { width: f64 },
    GeneralizedPoisson { j: u32 },
    Maxwellian,
}

/// Time modulation `c(t)` of the kinetic data `h(x,v,t) = g(x) q(v) c(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    #[default]
    Constant,
    /// `1 + a e^{-λt} sin(νt)`.
    Modulated { amplitude: f64, rate: f64, frequency: f64 },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Modulated { amplitude, rate, frequency } => 1.0 + amplitude * (-rate * t).exp() * (frequency * t).sin(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 0.0,
            TimeProfile::Modulated { amplitude, rate, frequency } => {
                amplitude * (-rate * t).exp() * (frequency * (frequency * t).cos() - rate * (frequency * t).sin())
            }
        }
    }
}

/// On-disk form of a separable kinetic forcing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeStreamingSpec {
    pub g: SpatialProfile,
    pub q: VelocityProfile,
    #[serde(default)]
    pub time: TimeProfile,
}

#[derive(Debug, Clone, Deserialize)]
struct ForcingFile {
    kind: String,
    g: Option<SpatialProfile>,
    q: Option<VelocityProfile>,
    #[serde(default)]
    time: TimeProfile,
    f0: Option<serde_json::Value>,
}

/// `h(x,v,t) = g(x) q(|v|) c(t)`, with `q` resolved to a radial equilibrium
/// when it is one of the built-in profiles.
#[derive(Debug, Clone)]
pub struct SeparableKinetic {
    pub spec: FreeStreamingSpec,
    q_eq: Option<RadialEquilibrium>,
}

impl SeparableKinetic {
    pub fn new(spec: FreeStreamingSpec) -> Result<Self> {
        let q_eq = match spec.q {
            VelocityProfile::Gaussian { width } => {
                if !(width > 0.0) {
                    return Err(Error::InvalidArgument(format!("velocity width {width} must be positive")));
                }
                None
            }
            VelocityProfile::GeneralizedPoisson { j } => Some(RadialEquilibrium::generalized_poisson(j)?),
            VelocityProfile::Maxwellian => Some(RadialEquilibrium::maxwellian()),
        };
        if let SpatialProfile::Gaussian { width, .. } = spec.g {
            if !(width > 0.0) {
                return Err(Error::InvalidArgument(format!("spatial width {width} must be positive")));
            }
        }
        Ok(Self { spec, q_eq })
    }

    /// Gaussian data in `x` and `v`, both of unit width, constant in time.
    pub fn gaussian() -> Self {
        Self::new(FreeStreamingSpec {
            g: SpatialProfile::Gaussian { amplitude: 1.0, width: 1.0 },
            q: VelocityProfile::Gaussian { width: 1.0 },
            time: TimeProfile::Constant,
        })
        .expect("valid preset")
    }

    pub fn with_time(mut self, time: TimeProfile) -> Self {
        self.spec.time = time;
        self
    }

    /// Marginal density of `q` along one direction.
    pub fn q_marginal(&self, u: f64) -> f64 {
        match (&self.spec.q, &self.q_eq) {
            (VelocityProfile::Gaussian { width }, _) => (-u * u / (2.0 * width * width)).exp() / (2.0 * PI * width * width).sqrt(),
            (_, Some(eq)) => eq.m0_real(u),
            _ => unreachable!("non-gaussian profiles carry an equilibrium"),
        }
    }

    /// `q̂(s) = ∫ q(v) e^{-iv·η} dv` at `|η| = s`.
    pub fn q_fourier(&self, s: f64) -> f64 {
        match (&self.spec.q, &self.q_eq) {
            (VelocityProfile::Gaussian { width }, _) => (-0.5 * width * width * s * s).exp(),
            (_, Some(eq)) => eq.eval_m0_fourier(s),
            _ => unreachable!("non-gaussian profiles carry an equilibrium"),
        }
    }

    pub fn q_3d(&self, v_abs: f64) -> f64 {
        match (&self.spec.q, &self.q_eq) {
            (VelocityProfile::Gaussian { width }, _) => {
                (-v_abs * v_abs / (2.0 * width * width)).exp() / (2.0 * PI * width * width).powf(1.5)
            }
            (_, Some(eq)) => eq.profile_3d(v_abs).expect("built-in profiles have a 3D form"),
            _ => unreachable!("non-gaussian profiles carry an equilibrium"),
        }
    }

    /// `ĥ(ξ,t) = ĝ(ξ) c(t) q̂(t|ξ|)`.
    pub fn h_hat(&self, xi_abs: f64, t: f64) -> Complex64 {
        Complex64::new(self.spec.g.fourier(xi_abs) * self.spec.time.value(t) * self.q_fourier(t * xi_abs), 0.0)
    }

    /// Effective support of the marginal, for quadrature in `u`.
    fn marginal_reach(&self) -> Option<f64> {
        match self.spec.q {
            VelocityProfile::Gaussian { width } => Some(12.0 * width),
            VelocityProfile::Maxwellian => Some(9.0),
            VelocityProfile::GeneralizedPoisson { .. } => None,
        }
    }
}

/// The forcing of a Volterra solve.
#[derive(Clone)]
pub enum ForcingSpec {
    FreeStreaming(SeparableKinetic),
    /// `t ↦ ĥ(ξ,t)` for the mode being solved.
    Synthetic(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl std::fmt::Debug for ForcingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ForcingSpec::FreeStreaming(k) => f.debug_tuple("FreeStreaming").field(&k.spec).finish(),
            ForcingSpec::Synthetic(_) => f.write_str("Synthetic(..)"),
        }
    }
}

impl ForcingSpec {
    /// Parses `{"kind": "free_streaming", "g": {...}, "q": {...}}`. A general
    /// `f0` descriptor is rejected as non-separable.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ForcingFile = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("forcing spec: {e}")))?;
        if file.kind != "free_streaming" {
            return Err(Error::InvalidArgument(format!("unknown forcing kind {:?}", file.kind)));
        }
        if file.f0.is_some() {
            return Err(Error::NonSeparable("only g(x)·q(|v|) data are supported".into()));
        }
        match (file.g, file.q) {
            (Some(g), Some(q)) => Ok(ForcingSpec::FreeStreaming(SeparableKinetic::new(FreeStreamingSpec { g, q, time: file.time })?)),
            _ => Err(Error::NonSeparable("both g and q must be given".into())),
        }
    }

    pub fn h_hat(&self, xi_abs: f64, t: f64) -> Complex64 {
        match self {
            ForcingSpec::FreeStreaming(k) => k.h_hat(xi_abs, t),
            ForcingSpec::Synthetic(f) => f(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolterraGrid {
    pub xi: [f64; 3],
    pub t_max: f64,
    pub n_steps: usize,
    pub dt: f64,
    pub rho_hat: Vec<Complex64>,
    pub h_hat: Vec<Complex64>,
}

impl VolterraGrid {
    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|n| n as f64 * self.dt).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Product trapezoid, second order.
    #[default]
    Trapezoid,
    /// Gregory end corrections, fourth order once `n ≥ 8`.
    Gregory,
}

/// Quadrature weights for `∫₀^{t_n}` on `n+1` nodes, in units of `dt`.
pub fn quadrature_weights(n: usize, scheme: Scheme) -> Vec<f64> {
    if n == 0 {
        return vec![0.0];
    }
    let mut w = vec![1.0; n + 1];
    match scheme {
        Scheme::Gregory if n >= 8 => {
            const END: [f64; 4] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0, 1.0];
            for (i, e) in END.iter().enumerate() {
                w[i] = *e;
                w[n - i] = *e;
            }
        }
        Scheme::Gregory if n >= 2 => {
            // Simpson, with a 3/8 panel in front when n is odd.
            let start = if n % 2 == 1 {
                for (i, e) in [3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0].iter().enumerate() {
                    w[i] = *e;
                }
                3
            } else {
                w[0] = 0.0;
                0
            };
            for i in start..=n {
                w[i] = if i == start || i == n { 1.0 / 3.0 } else if (i - start) % 2 == 1 { 4.0 / 3.0 } else { 2.0 / 3.0 };
            }
            if start == 3 {
                w[3] += 3.0 / 8.0 - if n == 3 { 1.0 / 3.0 } else { 0.0 };
            }
        }
        _ => {
            w[0] = 0.5;
            w[n] = 0.5;
        }
    }
    w
}

fn norm_of(xi: [f64; 3]) -> f64 {
    (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
}

/// Samples `s m̂₀(s|ξ|)` at the lags `s = k·dt`.
pub fn kernel_table(eq: &RadialEquilibrium, xi_abs: f64, dt: f64, n_steps: usize) -> Vec<f64> {
    (0..=n_steps)
        .map(|k| {
            let s = k as f64 * dt;
            s * eq.eval_m0_fourier(s * xi_abs)
        })
        .collect()
}

/// Marches `ρ_n = ĥ_n - dt Σ_m w_{n,m} K_{n-m} ρ_m`. The diagonal weight meets
/// `K_0 = 0`, so no solve is needed.
pub fn solve_with_kernel(kernel: &[f64], h_hat: &[Complex64], dt: f64, scheme: Scheme) -> Result<Vec<Complex64>> {
    if kernel.len() < h_hat.len() {
        return Err(Error::MeshMismatch { left: kernel.len(), right: h_hat.len() });
    }
    let mut rho: Vec<Complex64> = Vec::with_capacity(h_hat.len());
    if scheme == Scheme::Gregory && h_hat.len() >= 3 && kernel.len() >= 4 {
        // Steps one and two solved together: a quadratic through the first
        // three nodes on [0, dt], Simpson on [0, 2dt]. The kernel at lag -dt
        // is extrapolated from the one-sided table.
        let (k1, k2) = (kernel[1], kernel[2]);
        let k_neg = 4.0 * kernel[0] - 6.0 * k1 + 4.0 * k2 - kernel[3];
        let rho0 = h_hat[0];
        let a = h_hat[1] - dt * 5.0 / 12.0 * k1 * rho0;
        let b = -dt * k_neg / 12.0;
        let c = h_hat[2] - dt * k2 * rho0 / 3.0;
        let d = dt * 4.0 / 3.0 * k1;
        let rho1 = (a - b * c) / (1.0 - b * d);
        rho.extend([rho0, rho1, c - d * rho1]);
    }
    for (n, h) in h_hat.iter().enumerate().skip(rho.len()) {
        let w = quadrature_weights(n, scheme);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            acc += w[m] * kernel[n - m] * rho[m];
        }
        rho.push(h - dt * acc);
    }
    Ok(rho)
}

pub fn solve_volterra(eq: &RadialEquilibrium, forcing: &ForcingSpec, xi: [f64; 3], t_max: f64, n_steps: usize) -> Result<VolterraGrid> {
    solve_volterra_with(eq, forcing, xi, t_max, n_steps, Scheme::Trapezoid)
}

pub fn solve_volterra_with(
    eq: &RadialEquilibrium,
    forcing: &ForcingSpec,
    xi: [f64; 3],
    t_max: f64,
    n_steps: usize,
    scheme: Scheme,
) -> Result<VolterraGrid> {
    if n_steps < 8 {
        return Err(Error::InvalidArgument(format!("n_steps = {n_steps} below 8")));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_max = {t_max} must be positive")));
    }
    let xi_abs = norm_of(xi);
    let dt = t_max / n_steps as f64;
    let h_hat: Vec<Complex64> = (0..=n_steps).map(|n| forcing.h_hat(xi_abs, n as f64 * dt)).collect();
    let kernel = kernel_table(eq, xi_abs, dt, n_steps);
    let rho_hat = solve_with_kernel(&kernel, &h_hat, dt, scheme)?;
    Ok(VolterraGrid { xi, t_max, n_steps, dt, rho_hat, h_hat })
}

/// Smooth part of a Green's function on the mesh; `δ₀` always acts as the
/// identity.
#[derive(Debug, Clone, PartialEq)]
pub enum GreensSource {
    DeltaOnly,
    /// Generalized Poisson index, evaluated by residues.
    ClosedForm(u32),
    /// `smooth(k·dt)` for `k = 0..`.
    Samples(Vec<f64>),
}

/// `ρ_n = ĥ_n + dt Σ_m w_{n,m} smooth(t_n - t_m) ĥ_m`.
pub fn greens_convolution(source: &GreensSource, xi_abs: f64, h_hat: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
    greens_convolution_with(source, xi_abs, h_hat, dt, Scheme::Trapezoid)
}

pub fn greens_convolution_with(source: &GreensSource, xi_abs: f64, h_hat: &[Complex64], dt: f64, scheme: Scheme) -> Result<Vec<Complex64>> {
    let smooth: Vec<f64> = match source {
        GreensSource::DeltaOnly => return Ok(h_hat.to_vec()),
        GreensSource::ClosedForm(j) => {
            let poles = crate::poisson_kernels::poles(*j, xi_abs)?;
            (0..h_hat.len())
                .map(|k| crate::greens_function::closed_form_from(&poles, k as f64 * dt).smooth)
                .collect()
        }
        GreensSource::Samples(s) => {
            if s.len() != h_hat.len() {
                return Err(Error::MeshMismatch { left: s.len(), right: h_hat.len() });
            }
            s.clone()
        }
    };
    let mut rho = Vec::with_capacity(h_hat.len());
    for n in 0..h_hat.len() {
        let w = quadrature_weights(n, scheme);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..=n {
            acc += w[m] * smooth[n - m] * h_hat[m];
        }
        rho.push(h_hat[n] + dt * acc);
    }
    Ok(rho)
}

/// `max_n |a_n - b_n|` over the common prefix.
pub fn max_difference(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `‖ρ(dt) - ρ(dt/2)‖ / ‖ρ(dt/2) - ρ(dt/4)‖` on the coarse mesh.
pub fn mesh_convergence_ratio(coarse: &[Complex64], half: &[Complex64], quarter: &[Complex64]) -> Result<f64> {
    let n = coarse.len() - 1;
    if half.len() != 2 * n + 1 || quarter.len() != 4 * n + 1 {
        return Err(Error::MeshMismatch { left: half.len(), right: 2 * n + 1 });
    }
    let e1 = (0..=n).map(|i| (coarse[i] - half[2 * i]).norm()).fold(0.0, f64::max);
    let e2 = (0..=n).map(|i| (half[2 * i] - quarter[4 * i]).norm()).fold(0.0, f64::max);
    Ok(e1 / e2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub times: Vec<f64>,
    /// `max |h(x,t)|` over the sampled radii.
    pub sup_norms: Vec<f64>,
    pub exponent: Option<f64>,
}

pub const DEFAULT_DECAY_TIMES: [f64; 5] = [4.0, 8.0, 16.0, 32.0, 64.0];

/// `h(x,t) = ∫ g(x - tv) q(v) dv` at `|x| = rho`, written as
/// `t⁻³ ∫ 4πy² q(y/t) ⟨g⟩_{rho,y} dy` with the spherical mean of `g`.
pub fn free_streaming_density(f0: &SeparableKinetic, rho: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(f0.spec.g.value(rho));
    }
    let reach = f0.spec.g.reach();
    let lo = (rho - reach).max(0.0);
    let hi = rho + reach;
    let bp: Vec<f64> = (0..=32).map(|i| lo + (hi - lo) * i as f64 / 32.0).collect();
    let cfg = QuadConfig::tight();
    let inner = quadrature::integrate_real(|y| 4.0 * PI * y * y * f0.q_3d(y / t) * f0.spec.g.shell_mean(rho, y), &bp, &cfg)?;
    Ok(inner / t.powi(3) * f0.spec.time.value(t))
}

/// Samples `ĥ(ξ,t)` on `t_grid` and fits `sup_x |h(·,t)| ~ t^p` over
/// `decay_times`, with the supremum taken over `|x| ∈ {0, w, 2w, 4w}`.
pub fn free_streaming_forcing(f0: &SeparableKinetic, t_grid: &[f64], xi: [f64; 3], decay_times: &[f64]) -> Result<(Vec<Complex64>, DecayReport)> {
    let xi_abs = norm_of(xi);
    let h_hat = t_grid.iter().map(|&t| f0.h_hat(xi_abs, t)).collect();
    let w = match f0.spec.g {
        SpatialProfile::Gaussian { width, .. } => width,
        SpatialProfile::Zero => 1.0,
    };
    let mut sup_norms = Vec::with_capacity(decay_times.len());
    for &t in decay_times {
        let mut sup: f64 = 0.0;
        for rho in [0.0, w, 2.0 * w, 4.0 * w] {
            sup = sup.max(free_streaming_density(f0, rho, t)?.abs());
        }
        sup_norms.push(sup);
    }
    let samples: Vec<(f64, f64)> = decay_times.iter().copied().zip(sup_norms.iter().copied()).collect();
    let exponent = report::loglog_fit(&samples).map(|(p, _)| p);
    Ok((h_hat, DecayReport { times: decay_times.to_vec(), sup_norms, exponent }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Representations {
    pub xi_abs: f64,
    pub dt: f64,
    pub rho_i: Vec<Complex64>,
    pub rho_ii: Vec<Complex64>,
    /// Set when `|1 - u|ξ| - i|ξ||` drops below 0.1 on the `u` nodes.
    pub small_denominator: bool,
}

/// Fourth-order central differences, one-sided at the two ends.
pub fn finite_difference_derivative(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "need at least five samples");
    let f = values;
    (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                -f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]
            } else if i < 2 {
                -25.0 * f[i] + 48.0 * f[i + 1] - 36.0 * f[i + 2] + 16.0 * f[i + 3] - 3.0 * f[i + 4]
            } else {
                25.0 * f[i] - 48.0 * f[i - 1] + 36.0 * f[i - 2] - 16.0 * f[i - 3] + 3.0 * f[i - 4]
            };
            d / (12.0 * dt)
        })
        .collect()
}

/// Gauss–Legendre nodes and weights for `∫ q_marginal(u) F(u) du`.
fn u_quadrature(f0: &SeparableKinetic, points: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = quadrature::gauss_legendre(points);
    match f0.marginal_reach() {
        Some(reach) => x.iter().zip(&w).map(|(x, w)| (reach * x, reach * w * f0.q_marginal(reach * x))).unzip(),
        None => x
            .iter()
            .zip(&w)
            .map(|(x, w)| {
                let phi = 0.5 * PI * x;
                let u = phi.tan();
                let jac = 0.5 * PI / phi.cos().powi(2);
                (u, w * jac * f0.q_marginal(u))
            })
            .unzip(),
    }
}

/// Both normal-form representations of the Poisson-equilibrium density for
/// separable data with `ĝ` real and `q` radial. `analytic_derivative = false`
/// replaces `ċ(t)` by finite differences on the grid.
pub fn poisson_representations(f0: &SeparableKinetic, xi_abs: f64, t_max: f64, n_steps: usize, analytic_derivative: bool) -> Result<Representations> {
    if !(xi_abs > 0.0) {
        return Err(Error::InvalidArgument(format!("|xi| = {xi_abs} must be positive")));
    }
    if n_steps < 8 {
        return Err(Error::InvalidArgument(format!("n_steps = {n_steps} below 8")));
    }
    let r = xi_abs;
    let dt = t_max / n_steps as f64;
    let times: Vec<f64> = (0..=n_steps).map(|n| n as f64 * dt).collect();
    let g_hat = f0.spec.g.fourier(r);
    let c: Vec<f64> = times.iter().map(|&t| f0.spec.time.value(t)).collect();
    let dc: Vec<f64> = if analytic_derivative {
        times.iter().map(|&t| f0.spec.time.derivative(t)).collect()
    } else {
        finite_difference_derivative(&c, dt)
    };

    let mut points = 400;
    let mut small_denominator = false;
    let (probe, _) = u_quadrature(f0, points);
    if probe.iter().any(|u| Complex64::new(1.0 - u * r, -r).norm() < 0.1) {
        small_denominator = true;
        points *= 2;
    }
    let (us, ws) = u_quadrature(f0, points);
    let i = Complex64::i();

    // v-averages as functions of time: ∫ q(u) F(u) e^{-itru} du.
    let average = |t: f64, weight: &dyn Fn(f64) -> Complex64| -> Complex64 {
        us.iter().zip(&ws).map(|(&u, &w)| w * weight(u) * (-i * t * r * u).exp()).sum()
    };
    let one = |_: f64| Complex64::new(1.0, 0.0);
    let mult_ii = |u: f64| {
        let a = Complex64::new(r, -r * u);
        a * a / (1.0 + a * a)
    };
    let denom = |u: f64| 1.0 / Complex64::new(1.0 - r * u, -r);

    let plain: Vec<Complex64> = times.iter().map(|&t| average(t, &one)).collect();
    let with_denominator: Vec<Complex64> = times.iter().map(|&t| average(t, &denom)).collect();
    let decay: Vec<f64> = (0..=n_steps).map(|k| (-(k as f64) * dt * r).exp()).collect();

    let mut rho_i = Vec::with_capacity(n_steps + 1);
    let mut rho_ii = Vec::with_capacity(n_steps + 1);
    for n in 0..=n_steps {
        let t = times[n];
        // The first step integrates the quadratic through the first three nodes.
        let w = if n == 1 && n_steps >= 2 { vec![5.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0] } else { quadrature_weights(n, Scheme::Gregory) };
        let mut t_i = Complex64::new(0.0, 0.0);
        let mut t_ii = Complex64::new(0.0, 0.0);
        for m in 0..w.len() {
            let s = times[m];
            let damp = if m <= n { decay[n - m] } else { ((s - t) * r).exp() };
            let phase = (i * s).exp() * damp * w[m];
            t_i += phase * c[m] * plain[m];
            t_ii += phase * dc[m] * with_denominator[m];
        }
        let t_i = -i * dt * t_i * g_hat;
        let t_ii = (decay[n] * c[0] * with_denominator[0] + dt * t_ii) * g_hat;
        let r_i = g_hat * c[n] * plain[n];
        let r_ii = g_hat * c[n] * average(t, &mult_ii);
        let osc = (-i * t).exp();
        rho_i.push(r_i + (osc * t_i).re);
        rho_ii.push(r_ii + (osc * t_ii).re);
    }
    Ok(Representations { xi_abs, dt, rho_i, rho_ii, small_denominator })
}

/// Frequency in `[lo, hi]` maximizing the Hann-windowed spectrum of the last
/// `window` time units of `values`.
pub fn spectral_peak(values: &[Complex64], dt: f64, window: f64, lo: f64, hi: f64) -> f64 {
    let len = ((window / dt).round() as usize).min(values.len());
    let tail = &values[values.len() - len..];
    let power = |nu: f64| -> f64 {
        tail.iter()
            .enumerate()
            .map(|(n, x)| {
                let hann = 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos();
                hann * x * Complex64::from_polar(1.0, -nu * n as f64 * dt)
            })
            .sum::<Complex64>()
            .norm()
    };
    let grid = 2000;
    (0..=grid)
        .map(|i| lo + (hi - lo) * i as f64 / grid as f64)
        .max_by(|a, b| power(*a).total_cmp(&power(*b)))
        .unwrap_or(lo)
}

/// Closed-form Green's solution of the Poisson mode, convenient as an oracle.
pub fn poisson_greens_solution(h_hat: &[Complex64], xi_abs: f64, dt: f64) -> Result<Vec<Complex64>> {
    let smooth: Vec<f64> = (0..h_hat.len()).map(|k| greens_closed_form(1, xi_abs, k as f64 * dt).map(|v| v.smooth)).collect::<Result<_>>()?;
    greens_convolution(&GreensSource::Samples(smooth), xi_abs, h_hat, dt)
}
