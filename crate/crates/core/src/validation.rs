//! The numbered acceptance criteria and the per-equilibrium suites behind the
//! `validate` command. Every check records what it measured, so a failure
//! report says by how much a tolerance was missed.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dispersion_function::{self, eval_k_quadrature, InfinityOrder};
use crate::dispersion_relation::{self, bracket_of, penrose_check, solve_zeta, thin_tail_expansion_check};
use crate::equilibria::{RadialEquilibrium, TailClass};
use crate::error::Result;
use crate::greens_function::{greens_closed_form, greens_real_line, HighFrequencyContour, LowFrequencyContour};
use crate::poisson_kernels::{self, branch_root_expansion, kj_coefficients, qj_polynomial, PoleParams};
use crate::quadrature::QuadConfig;
use crate::report::{linear_fit, loglog_fit};
use crate::volterra::{
    self, free_streaming_forcing, greens_convolution_with, max_difference, mesh_convergence_ratio, poisson_representations,
    solve_volterra_with, ForcingSpec, GreensSource, Scheme, SeparableKinetic, TimeProfile,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Reported but not counted towards the verdict.
    pub informational: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Checks(pub Vec<Check>);

impl Checks {
    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), passed, detail: detail.into(), informational: false });
    }

    pub fn info(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), passed: true, detail: detail.into(), informational: true });
    }

    /// Records an error as a failed check instead of aborting the criterion.
    pub fn attempt<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(name, false, format!("error: {e}"));
                None
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.0.iter().all(|c| c.informational || c.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed_s: f64,
    pub budget_s: f64,
    pub passed: bool,
}

impl CriterionOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.informational && !c.passed)
    }
}

fn timed(id: u32, title: &'static str, budget_s: f64, body: impl FnOnce(&mut Checks)) -> CriterionOutcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    body(&mut checks);
    let elapsed_s = start.elapsed().as_secs_f64();
    let within = elapsed_s <= budget_s;
    checks.push("runtime", within, format!("{elapsed_s:.2} s of {budget_s} s"));
    let passed = checks.passed();
    CriterionOutcome { id, title, checks: checks.0, elapsed_s, budget_s, passed }
}

fn gp(j: u32) -> RadialEquilibrium {
    RadialEquilibrium::generalized_poisson(j).expect("j >= 1")
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn fmt_slope(s: Option<f64>) -> String {
    s.map_or_else(|| "undefined".into(), |s| format!("{s:.3}"))
}

pub fn criterion_1() -> CriterionOutcome {
    timed(1, "exact kernel recursions", 1.0, |c| {
        for j in 1..=8 {
            let (Some(k), Some(q)) = (c.attempt("kj", kj_coefficients(j)), c.attempt("qj", qj_polynomial(j))) else { continue };
            let equal = k.a == q.implied_kernel_coefficients();
            c.push(format!("j={j} recursions agree"), equal, format!("{} coefficients", k.a.len()));
        }
        let expected: [&[i64]; 3] = [&[1], &[1, 2], &[1, 2, 2]];
        for (j, want) in (1..=3).zip(expected) {
            if let Some(k) = c.attempt("kj", kj_coefficients(j)) {
                let got: Vec<String> = k.a.iter().map(|a| a.to_string()).collect();
                let want_s: Vec<String> = want.iter().map(|a| a.to_string()).collect();
                c.push(format!("j={j} explicit kernel"), got == want_s, format!("{{{}}}", got.join(",")));
            }
        }
    })
}

/// `n_x × n_y` points of `{|Im z| < frac·ϑ'(1+|Re z|)}` with `|Re z| ≤ x_max`.
pub fn strip_grid(eq: &RadialEquilibrium, frac: f64, x_max: f64, n_x: usize, n_y: usize) -> Vec<Complex64> {
    let width = frac * eq.theta_prime();
    let mut pts = Vec::with_capacity(n_x * n_y);
    for i in 0..n_x {
        let x = -x_max + 2.0 * x_max * (i as f64 + 0.5) / n_x as f64;
        for k in 0..n_y {
            let s = -1.0 + 2.0 * (k as f64 + 0.5) / n_y as f64;
            pts.push(Complex64::new(x, 0.999 * s * width * (1.0 + x.abs())));
        }
    }
    pts
}

pub fn criterion_2() -> CriterionOutcome {
    timed(2, "closed-form k against quadrature", 30.0, |c| {
        for j in 1..=3 {
            let eq = gp(j);
            let pts = strip_grid(&eq, 0.5, 10.0, 40, 25);
            let cfg = QuadConfig::tight();
            let diffs: Vec<Result<f64>> = pts
                .par_iter()
                .map(|&z| {
                    let a = dispersion_function::eval_k(&eq, z)?.k;
                    let b = eval_k_quadrature(&eq, z, &cfg)?.k;
                    Ok((a - b).norm())
                })
                .collect();
            let diffs: Result<Vec<f64>> = diffs.into_iter().collect();
            if let Some(d) = c.attempt("quadrature", diffs) {
                let worst = d.iter().cloned().fold(0.0, f64::max);
                c.push(format!("gp{j}: {} points", d.len()), worst <= 1e-8, format!("max |diff| {}", sci(worst)));
            }
        }
    })
}

pub fn criterion_3() -> CriterionOutcome {
    timed(3, "Poisson dispersion relation", 10.0, |c| {
        let eq = gp(1);
        let mut worst_omega: f64 = 0.0;
        let mut worst_residual: f64 = 0.0;
        for k in 1..=30 {
            let r = 0.01 * k as f64;
            if let Some(p) = c.attempt(&format!("r={r}"), solve_zeta(&eq, r)) {
                worst_omega = worst_omega.max((p.omega - Complex64::new(1.0, r)).norm());
                worst_residual = worst_residual.max(p.residual);
            }
        }
        c.push("omega = 1 + ir", worst_omega <= 1e-10, format!("max |omega - 1 - ir| {}", sci(worst_omega)));
        c.push("residual", worst_residual < 1e-10, format!("max residual {}", sci(worst_residual)));
    })
}

pub fn criterion_4() -> CriterionOutcome {
    timed(4, "thin-tail expansion of the real frequency", 60.0, |c| {
        let eq = RadialEquilibrium::maxwellian();
        let grid = [0.2, 0.1, 0.05, 0.025];
        let mut samples = Vec::new();
        for &r in &grid {
            if let Some(p) = c.attempt(&format!("r={r}"), solve_zeta(&eq, r)) {
                samples.push((r, (p.omega.re - 1.0 - 0.75 * r * r).abs()));
            }
        }
        let slope = loglog_fit(&samples).map(|f| f.0);
        c.push(
            "order of |omega1 - 1 - 0.75 r^2|",
            slope.is_some_and(|s| s >= 3.5),
            format!("slope {}, remainders {}", fmt_slope(slope), samples.iter().map(|s| sci(s.1)).collect::<Vec<_>>().join(" ")),
        );
        if let Some(rep) = c.attempt("complex remainder", thin_tail_expansion_check(&eq, &grid)) {
            c.info("|omega - 1 - 0.75 r^2| envelope ratio", format!("max {}, slope {}", rep.max_ratio.map_or("undefined".into(), sci), fmt_slope(rep.exponent)));
        }
    })
}

pub fn criterion_5() -> CriterionOutcome {
    timed(5, "dissipation bracket", 60.0, |c| {
        let grid = [0.1, 0.15, 0.2, 0.25];
        for eq in [RadialEquilibrium::maxwellian(), gp(2)] {
            let mut logs = Vec::new();
            for &r in &grid {
                let Some(p) = c.attempt(&format!("{} r={r}", eq.label()), solve_zeta(&eq, r)) else { continue };
                let upper = -PI * eq.m0_prime_real(p.omega.re / r) / (r * r);
                let ok = bracket_of(&eq, &p).is_ok();
                c.push(
                    format!("{} r={r}", eq.label()),
                    ok,
                    format!("omega2 {} in [{}, {}]", sci(p.omega.im), sci(0.25 * upper), sci(upper)),
                );
                logs.push((1.0 / (r * r), p.omega.im.ln()));
            }
            if eq.tail_class() == TailClass::ThinTail && eq.poisson_index().is_none() {
                let slope = linear_fit(&logs).map(|f| f.0);
                c.push("maxwellian log omega2 against 1/r^2", slope.is_some_and(|s| s < 0.0), format!("slope {slope:?}"));
            }
        }
    })
}

pub fn criterion_6() -> CriterionOutcome {
    timed(6, "Penrose stability", 30.0, |c| {
        let probes = [0.1, 0.5, 1.0, 2.0, 5.0];
        let mut eqs = vec![RadialEquilibrium::maxwellian()];
        eqs.extend((1..=4).map(gp));
        for eq in eqs {
            if let Some(rep) = c.attempt(&eq.label(), penrose_check(&eq, &probes)) {
                let windings: Vec<i64> = rep.winding_numbers.iter().map(|w| w.1).collect();
                c.push(eq.label(), rep.stable && windings.iter().all(|w| *w == 0), format!("windings {windings:?}"));
            }
        }
    })
}

pub fn tau_samples(n: usize, tau_max: f64) -> Vec<f64> {
    (0..n).map(|i| tau_max * i as f64 / (n - 1) as f64).collect()
}

pub fn criterion_7() -> CriterionOutcome {
    timed(7, "Green's function three-way agreement", 300.0, |c| {
        let taus = tau_samples(41, 20.0);
        for j in [1, 2] {
            let eq = gp(j);
            if let Some(low) = c.attempt("low contour", LowFrequencyContour::new(&eq, 0.05)) {
                let mut worst: f64 = 0.0;
                let mut worst_error: f64 = 0.0;
                for &t in &taus {
                    let (Some(a), Some(b)) = (c.attempt("closed form", greens_closed_form(j, 0.05, t)), c.attempt("contour", low.eval(t))) else {
                        continue;
                    };
                    worst = worst.max((a.smooth - b.smooth).abs());
                    worst_error = worst_error.max(b.decomposition.map_or(0.0, |d| d.error.abs()));
                }
                c.push(format!("gp{j} |xi|=0.05 closed vs contour"), worst <= 1e-7, format!("max diff {}", sci(worst)));
                if j == 1 {
                    c.push("gp1 contour error term", worst_error <= 1e-9, format!("max |I1| {}", sci(worst_error)));
                }
            }
            let mut worst: f64 = 0.0;
            for &t in &taus {
                let (Some(a), Some(b)) = (c.attempt("closed form", greens_closed_form(j, 1.0, t)), c.attempt("real line", greens_real_line(&eq, 1.0, t))) else {
                    continue;
                };
                worst = worst.max((a.smooth - b.smooth).abs());
            }
            c.push(format!("gp{j} |xi|=1 closed vs real line"), worst <= 1e-7, format!("max diff {}", sci(worst)));
        }
    })
}

/// Splits `ratios` into calibration and held-out parts; passes when the
/// calibration maximum bounds every held-out value.
fn uniform_constant(c: &mut Checks, name: &str, calibration: &[f64], held_out: &[f64]) {
    let fit = calibration.iter().cloned().fold(0.0, f64::max);
    let worst = held_out.iter().cloned().fold(0.0, f64::max);
    let finite = calibration.iter().chain(held_out).all(|r| r.is_finite());
    // Ratios at roundoff level carry no information about the constant.
    c.push(name, finite && (worst <= fit || worst < 1e-12), format!("C {} from calibration, held-out max {}", sci(fit), sci(worst)));
}

/// Ratios against an envelope on a geometric grid, ordered towards the limit.
/// A bounded ratio may still creep up, but its increments must not grow.
fn decelerating(c: &mut Checks, name: &str, ratios: &[f64]) {
    let steps: Vec<f64> = ratios.windows(2).map(|w| w[1] - w[0]).collect();
    let finite = ratios.iter().all(|r| r.is_finite());
    let ok = match (steps.first(), steps.last()) {
        (Some(&first), Some(&last)) => last <= first.max(0.0) + 1e-12 * ratios[0].abs(),
        _ => false,
    };
    let list: Vec<String> = ratios.iter().map(|r| sci(*r)).collect();
    c.push(name, finite && ok, format!("ratios {}", list.join(" ")));
}

pub fn criterion_8() -> CriterionOutcome {
    timed(8, "Green's function envelopes", 600.0, |c| {
        let taus = tau_samples(41, 20.0);
        let split = taus.iter().position(|t| *t > 10.0).unwrap_or(taus.len());
        for eq in [RadialEquilibrium::maxwellian(), gp(2)] {
            let mut early = Vec::new();
            let mut late = Vec::new();
            for xi in [0.5, 1.0, 2.0, 4.0] {
                let Some(h) = c.attempt("high contour", HighFrequencyContour::new(&eq, xi, None)) else { continue };
                c.push(format!("{} |xi|={xi} gamma0 > 0", eq.label()), h.gamma0 > 0.0, format!("gamma0 {:.4}", h.gamma0));
                for (i, &t) in taus.iter().enumerate() {
                    if let Some(v) = c.attempt("high eval", h.eval(t)) {
                        let ratio = h.envelope_ratio(&v);
                        if i < split { early.push(ratio) } else { late.push(ratio) }
                    }
                }
            }
            uniform_constant(c, &format!("{} high frequency, tau <= 10 calibrates tau > 10", eq.label()), &early, &late);

            let mut general = Vec::new();
            let mut thin = Vec::new();
            for r in [0.1, 0.05, 0.02] {
                let Some(l) = c.attempt("low contour", LowFrequencyContour::new(&eq, r)) else { continue };
                let mut g = Vec::new();
                let mut t = Vec::new();
                for &tau in &taus {
                    if let Some(v) = c.attempt("low eval", l.eval(tau)) {
                        g.push(l.envelope_ratio(&v, false));
                        t.push(l.envelope_ratio(&v, true));
                    }
                }
                general.push(g);
                thin.push(t);
            }
            if general.len() == 3 {
                let held: Vec<f64> = general[1..].concat();
                uniform_constant(c, &format!("{} low frequency, r = 0.1 calibrates r < 0.1", eq.label()), &general[0], &held);
                if eq.poisson_index().is_none() {
                    let held: Vec<f64> = thin[1..].concat();
                    uniform_constant(c, "maxwellian thin-tail refinement", &thin[0], &held);
                }
            }
        }
    })
}

fn bump() -> ForcingSpec {
    ForcingSpec::Synthetic(Arc::new(|t: f64| Complex64::new((-(t - 3.0).powi(2)).exp(), 0.0)))
}

pub fn criterion_9() -> CriterionOutcome {
    timed(9, "Volterra against Green's convolution", 120.0, |c| {
        let cases = [(1, 0.05), (1, 0.5), (1, 2.0), (2, 0.05)];
        for (j, xi) in cases {
            let eq = gp(j);
            for scheme in [Scheme::Trapezoid, Scheme::Gregory] {
                let Some(g) = c.attempt("solve", solve_volterra_with(&eq, &bump(), [xi, 0.0, 0.0], 40.0, 2048, scheme)) else { continue };
                let Some(conv) = c.attempt("convolution", greens_convolution_with(&GreensSource::ClosedForm(j), xi, &g.h_hat, g.dt, scheme))
                else {
                    continue;
                };
                let gap = max_difference(&g.rho_hat, &conv);
                let name = format!("gp{j} |xi|={xi}");
                match scheme {
                    Scheme::Trapezoid => c.push(format!("{name} trapezoid"), gap <= 1e-6, format!("max gap {}", sci(gap))),
                    Scheme::Gregory => c.info(format!("{name} gregory"), format!("max gap {}", sci(gap))),
                }
            }
        }
        let eq = gp(1);
        let solve = |n| solve_volterra_with(&eq, &bump(), [0.5, 0.0, 0.0], 40.0, n, Scheme::Trapezoid).map(|g| g.rho_hat);
        if let (Some(a), Some(b), Some(q)) = (c.attempt("solve", solve(512)), c.attempt("solve", solve(1024)), c.attempt("solve", solve(2048))) {
            if let Some(ratio) = c.attempt("ratio", mesh_convergence_ratio(&a, &b, &q)) {
                c.push("mesh convergence ratio", (3.6..=4.4).contains(&ratio), format!("ratio {ratio:.3}"));
            }
        }
    })
}

/// Gaussian data in `x` and `v`, modulated in time so that both integrals of
/// the second representation contribute.
pub fn representation_forcing() -> SeparableKinetic {
    SeparableKinetic::gaussian().with_time(TimeProfile::Modulated { amplitude: 0.5, rate: 0.2, frequency: 0.7 })
}

pub fn criterion_10() -> CriterionOutcome {
    timed(10, "representation equivalence", 300.0, |c| {
        let f0 = representation_forcing();
        let (t_max, n) = (20.0, 8000);
        for xi in [0.3, 1.0] {
            let Some(rep) = c.attempt("representations", poisson_representations(&f0, xi, t_max, n, true)) else { continue };
            let Some(g) = c.attempt(
                "solve",
                solve_volterra_with(&gp(1), &ForcingSpec::FreeStreaming(f0.clone()), [xi, 0.0, 0.0], t_max, n, Scheme::Trapezoid),
            ) else {
                continue;
            };
            let d12 = max_difference(&rep.rho_i, &rep.rho_ii);
            let d1v = max_difference(&rep.rho_i, &g.rho_hat);
            let d2v = max_difference(&rep.rho_ii, &g.rho_hat);
            c.push(format!("|xi|={xi} I vs II"), d12 <= 1e-5, format!("max diff {}", sci(d12)));
            c.push(format!("|xi|={xi} I vs Volterra"), d1v <= 1e-5, format!("max diff {}", sci(d1v)));
            c.push(format!("|xi|={xi} II vs Volterra"), d2v <= 1e-5, format!("max diff {}", sci(d2v)));
            if rep.small_denominator {
                c.info(format!("|xi|={xi} small denominator"), "u-quadrature doubled");
            }
        }
    })
}

pub fn criterion_11() -> CriterionOutcome {
    timed(11, "free-streaming decay", 120.0, |c| {
        let f0 = SeparableKinetic::gaussian();
        if let Some((_, rep)) = c.attempt("forcing", free_streaming_forcing(&f0, &[0.0], [1.0, 0.0, 0.0], &volterra::DEFAULT_DECAY_TIMES)) {
            let p = rep.exponent;
            c.push("exponent 3 +- 0.1", p.is_some_and(|p| (p + 3.0).abs() <= 0.1), format!("fitted exponent {}", fmt_slope(p)));
        }
    })
}

/// One remainder series of the small-|ξ| pole expansions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionFit {
    pub name: &'static str,
    pub stated_order: f64,
    pub samples: Vec<(f64, f64)>,
    pub slope: Option<f64>,
}

pub const POLE_EXPANSION_GRID: [f64; 4] = [0.05, 0.025, 0.0125, 0.00625];

pub fn pole_expansion_fits(grid: &[f64]) -> Result<Vec<ExpansionFit>> {
    let names: [(&'static str, f64); 12] = [
        ("j=2 rho", 3.0),
        ("j=2 kappa", 4.0),
        ("j=2 alpha", 5.0),
        ("j=2 beta", 4.0),
        ("j=3 rho", 7.0),
        ("j=3 kappa1", 4.0),
        ("j=3 kappa3", 5.0),
        ("j=3 a", 7.0),
        ("j=3 b", 2.0),
        ("j=3 d", 5.0),
        ("j=4 zeta1", 3.0),
        ("j=5 zeta1", 3.0),
    ];
    let mut series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); names.len()];
    for &x in grid {
        let mut rem = Vec::with_capacity(names.len());
        if let PoleParams::Quadratic { rho, kappa, alpha, beta } = poisson_kernels::poles_j2(x)?.params {
            rem.extend([rho - x, kappa - 1.0 - 1.5 * x * x, alpha + 4.0 * x.powi(3), beta + 0.5 - 0.75 * x * x]);
        }
        if let PoleParams::Cubic { rho, kappa1, kappa3, a, b, d, .. } = poisson_kernels::poles_j3(x)?.params {
            rem.extend([
                rho - x + 8.0 * x.powi(5),
                kappa1 - 1.0 - 0.5 * x * x,
                kappa3 - x + 2.0 * x.powi(3),
                a + 16.0 * x.powi(5),
                b + 0.5,
                d + 2.0 * x.powi(3),
            ]);
        }
        for j in [4, 5] {
            let a2 = kj_coefficients(j)?.a2();
            rem.push((poisson_kernels::poles(j, x)?.branch_root() - branch_root_expansion(a2, x)).norm());
        }
        for (s, v) in series.iter_mut().zip(rem) {
            s.push((x, v.abs()));
        }
    }
    Ok(names
        .iter()
        .zip(series)
        .map(|(&(name, stated_order), samples)| ExpansionFit { name, stated_order, slope: loglog_fit(&samples).map(|f| f.0), samples })
        .collect())
}

pub fn criterion_12() -> CriterionOutcome {
    timed(12, "pole expansion orders", 60.0, |c| {
        if let Some(fits) = c.attempt("poles", pole_expansion_fits(&POLE_EXPANSION_GRID)) {
            for f in fits {
                let ok = f.slope.is_some_and(|s| (s - f.stated_order).abs() <= 0.15);
                c.push(f.name, ok, format!("slope {} against order {}", fmt_slope(f.slope), f.stated_order));
                if !ok && f.slope.is_some_and(|s| s > f.stated_order) {
                    c.info(format!("{} as a bound", f.name), format!("remainder is o(|xi|^{})", f.stated_order));
                }
            }
        }
    })
}

pub fn all_criteria() -> Vec<CriterionOutcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub equilibrium: String,
    pub suites: Vec<SuiteOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

fn suite(name: &'static str, body: impl FnOnce(&mut Checks)) -> SuiteOutcome {
    let mut c = Checks::default();
    body(&mut c);
    SuiteOutcome { suite: name, passed: c.passed(), checks: c.0 }
}

/// The oracle suites that apply to a single equilibrium.
pub fn validate_equilibrium(eq: &RadialEquilibrium) -> ValidationReport {
    let mut suites = Vec::new();
    suites.push(suite("equilibrium", |c| {
        if let Some(m) = c.attempt("mass", eq.moment(0)) {
            c.push("unit mass", (m.value - 1.0).abs() < 1e-8, format!("mass {:.12}", m.value));
        }
        let f0 = eq.eval_m0_fourier(0.0);
        c.push("transform at zero", (f0 - 1.0).abs() < 1e-8, format!("{f0:.12}"));
    }));
    suites.push(suite("dispersion_function", |c| {
        let cfg = QuadConfig::tight();
        let pts = strip_grid(eq, 0.5, 6.0, 6, 5);
        let mut worst: f64 = 0.0;
        for z in pts {
            if let (Some(a), Some(b)) = (c.attempt("eval", dispersion_function::eval_k(eq, z)), c.attempt("quadrature", eval_k_quadrature(eq, z, &cfg))) {
                worst = worst.max((a.k - b.k).norm());
            }
        }
        c.push("evaluation routes agree", worst <= 1e-8, format!("max diff {}", sci(worst)));
        if let Some(rep) = c.attempt("expansion at zero", dispersion_function::check_expansion_zero(eq, &[0.4, 0.2, 0.1, 0.05])) {
            c.push("second-order remainder at zero", rep.exponent.is_some_and(|s| s >= 1.85), format!("slope {}", fmt_slope(rep.exponent)));
        }
        let radii = [8.0, 16.0, 32.0, 64.0, 128.0];
        if let Some(rep) = c.attempt("expansion at infinity", dispersion_function::check_expansion_infinity(eq, &radii, InfinityOrder::General)) {
            let ratios: Vec<f64> = rep.samples.iter().map(|(r, v)| v / (r.powf(-eq.decay_order() - 1.0) + r.powi(-4) * r.ln())).collect();
            decelerating(c, "remainder at infinity", &ratios);
        }
    }));
    suites.push(suite("penrose", |c| {
        if let Some(rep) = c.attempt("penrose", penrose_check(eq, &[0.1, 0.5, 1.0, 2.0, 5.0])) {
            c.push("winding numbers vanish", rep.stable, format!("{:?}", rep.winding_numbers));
        }
    }));
    suites.push(suite("dispersion_relation", |c| {
        let r1 = dispersion_relation::default_r1(eq);
        let rs: Vec<f64> = (1..=10).map(|k| r1 * k as f64 / 10.0).collect();
        let mut worst: f64 = 0.0;
        for &r in &rs {
            if let Some(p) = c.attempt(&format!("r={r}"), solve_zeta(eq, r)) {
                worst = worst.max(p.residual);
                if eq.poisson_index() != Some(1) && r >= 0.1 {
                    let ok = bracket_of(eq, &p);
                    c.push(format!("bracket r={r:.3}"), ok.is_ok(), format!("omega2 {}", sci(p.omega.im)));
                }
            }
        }
        c.push("residuals", worst < 1e-12, format!("max residual {}", sci(worst)));
        if eq.tail_class() == TailClass::ThinTail && eq.variance().is_some() {
            if let Some(rep) = c.attempt("thin tail", thin_tail_expansion_check(eq, &[0.2, 0.1, 0.05, 0.025, 0.0125])) {
                let d = eq.decay_order();
                let ratios: Vec<f64> = rep.samples.iter().map(|(r, v)| v / (r.powf(d - 1.0) + r.powi(4) * (1.0 / r).ln())).collect();
                decelerating(c, "thin-tail remainder", &ratios);
            }
        }
    }));
    suites.push(suite("greens_function", |c| {
        let taus = tau_samples(21, 20.0);
        let mut early = Vec::new();
        let mut late = Vec::new();
        for xi in [0.5, 1.0, 2.0] {
            let Some(h) = c.attempt("high contour", HighFrequencyContour::new(eq, xi, None)) else { continue };
            for (i, &t) in taus.iter().enumerate() {
                if let Some(v) = c.attempt("high eval", h.eval(t)) {
                    let ratio = h.envelope_ratio(&v);
                    if i <= 10 { early.push(ratio) } else { late.push(ratio) }
                }
            }
        }
        uniform_constant(c, "high-frequency envelope", &early, &late);
        if let Some(j) = eq.poisson_index().filter(|j| *j <= 3) {
            let mut worst: f64 = 0.0;
            for &t in &taus {
                if let (Some(a), Some(b)) = (c.attempt("closed", greens_closed_form(j, 1.0, t)), c.attempt("real line", greens_real_line(eq, 1.0, t))) {
                    worst = worst.max((a.smooth - b.smooth).abs());
                }
            }
            c.push("closed form against real line", worst <= 1e-7, format!("max diff {}", sci(worst)));
        }
        let mut ratios = Vec::new();
        for r in [0.1, 0.05, 0.025, 0.0125] {
            let Some(l) = c.attempt("low contour", LowFrequencyContour::new(eq, r)) else { continue };
            let sup = taus.iter().filter_map(|&t| c.attempt("low eval", l.eval(t)).map(|v| l.envelope_ratio(&v, false))).fold(0.0, f64::max);
            ratios.push(sup);
        }
        if ratios.len() == 4 {
            if ratios.iter().all(|r| *r < 1e-12) {
                c.push("low-frequency envelope", true, "error term at roundoff");
            } else {
                decelerating(c, "low-frequency envelope", &ratios);
            }
        }
    }));
    suites.push(suite("volterra", |c| {
        let solve = |n| volterra::solve_volterra(eq, &bump(), [0.5, 0.0, 0.0], 20.0, n).map(|g| g.rho_hat);
        if let (Some(a), Some(b), Some(q)) = (c.attempt("solve", solve(256)), c.attempt("solve", solve(512)), c.attempt("solve", solve(1024))) {
            if let Some(ratio) = c.attempt("ratio", mesh_convergence_ratio(&a, &b, &q)) {
                c.push("mesh convergence ratio", (3.6..=4.4).contains(&ratio), format!("ratio {ratio:.3}"));
            }
            c.push("initial value", a[0] == bump().h_hat(0.5, 0.0), "rho(0) = h(0)");
        }
        if let Some(j) = eq.poisson_index().filter(|j| *j <= 3) {
            if let Some(g) = c.attempt("solve", solve_volterra_with(eq, &bump(), [0.5, 0.0, 0.0], 40.0, 2048, Scheme::Gregory)) {
                if let Some(conv) = c.attempt("convolution", greens_convolution_with(&GreensSource::ClosedForm(j), 0.5, &g.h_hat, g.dt, Scheme::Gregory)) {
                    let gap = max_difference(&g.rho_hat, &conv);
                    c.push("Green's convolution", gap <= 1e-6, format!("max gap {}", sci(gap)));
                }
            }
        }
    }));
    ValidationReport { equilibrium: eq.label(), suites }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recursions_criterion() {
        let c = criterion_1();
        assert!(c.passed, "{:?}", c.checks);
    }

    #[test]
    fn strip_grid_stays_inside() {
        let eq = gp(2);
        let pts = strip_grid(&eq, 0.5, 10.0, 40, 25);
        assert_eq!(pts.len(), 1000);
        assert!(pts.iter().all(|z| z.im.abs() < 0.5 * eq.theta_prime() * (1.0 + z.re.abs())));
    }

    #[test]
    fn calibration_rule() {
        let mut c = Checks::default();
        uniform_constant(&mut c, "decaying", &[1.0, 2.0], &[1.5, 0.1]);
        uniform_constant(&mut c, "growing", &[1.0, 2.0], &[2.5]);
        assert!(c.0[0].passed && !c.0[1].passed);
        c.info("note", "");
        assert!(!c.passed());
    }

    #[test]
    fn pole_fits_have_positive_slopes() {
        let fits = pole_expansion_fits(&POLE_EXPANSION_GRID).unwrap();
        assert_eq!(fits.len(), 12);
        for f in fits {
            assert!(f.slope.unwrap() > f.stated_order - 0.15, "{}", f.name);
        }
    }
}
