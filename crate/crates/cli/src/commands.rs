use std::fs;
use std::path::Path;

use landau_core::dispersion_relation::{bracket_of, dispersion_sweep, penrose_check, DispersionConfig};
use landau_core::equilibria::EquilibriumSpec;
use landau_core::greens_function::{
    greens_closed_form, greens_real_line, GreensValue, HighFrequencyContour, LowFrequencyContour,
};
use landau_core::poisson_kernels::poles;
use landau_core::validation::{self, Check};
use landau_core::volterra::{free_streaming_forcing, solve_volterra_with, ForcingSpec};
use landau_core::{Error, RadialEquilibrium};
use rayon::prelude::*;

use crate::output::{emit, Cell, Format, Table};
use crate::{Cli, Command, Failure, GreensMethod};

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn equilibrium(cli: &Cli) -> Result<RadialEquilibrium, Failure> {
    let path = cli.common.equilibrium.as_deref().ok_or_else(|| Failure::Usage("--equilibrium is required".into()))?;
    Ok(EquilibriumSpec::from_json(&read(path)?)?)
}

fn write(cli: &Cli, text: &str) -> Outcome {
    emit(text, cli.common.output.as_deref()).map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

fn write_table(cli: &Cli, table: &Table) -> Outcome {
    write(cli, &table.render(cli.common.format))
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Penrose { probes, curve } => penrose(cli, probes, *curve),
        Command::Dispersion { r_grid, warm_start, bracket } => {
            let eq = equilibrium(cli)?;
            let rs = r_grid.points();
            let mut table = Table::new(&["r", "re_zeta", "im_zeta", "omega1", "omega2", "re_m_l", "im_m_l", "residual", "iterations"]);
            let mut violation = None;
            for p in dispersion_sweep(&eq, &rs, &DispersionConfig::default(), *warm_start) {
                let p = p?;
                if *bracket && violation.is_none() {
                    violation = bracket_of(&eq, &p).err();
                }
                table.push(vec![
                    p.r.into(),
                    p.zeta.re.into(),
                    p.zeta.im.into(),
                    p.omega.re.into(),
                    p.omega.im.into(),
                    p.m_l.re.into(),
                    p.m_l.im.into(),
                    p.residual.into(),
                    p.iterations.into(),
                ]);
            }
            write_table(cli, &table)?;
            match violation {
                Some(e) => Err(e.into()),
                None => Ok(()),
            }
        }
        Command::Poles { j, xi_grid } => {
            let xs = xi_grid.points();
            if let Some(x) = xs.iter().find(|x| **x <= 0.0) {
                return Err(Failure::Usage(format!("xi must be > 0, grid contains {x}")));
            }
            let sets = xs.par_iter().map(|&x| poles(*j, x)).collect::<Result<Vec<_>, Error>>()?;
            let mut table = Table::new(&["xi", "index", "re_zeta", "im_zeta", "re_theta", "im_theta", "re_residue", "im_residue", "branch"]);
            for set in sets {
                let branch = set.branch_root();
                for (k, ((root, theta), res)) in set.roots.iter().zip(set.theta_poles()).zip(&set.residues).enumerate() {
                    table.push(vec![
                        set.xi_abs.into(),
                        k.into(),
                        root.re.into(),
                        root.im.into(),
                        theta.re.into(),
                        theta.im.into(),
                        res.re.into(),
                        res.im.into(),
                        i64::from(*root == branch).into(),
                    ]);
                }
            }
            write_table(cli, &table)
        }
        Command::Greens { xi_grid, xi, tau_grid, method, envelope_constant } => {
            let xs = match (xi_grid, xi) {
                (Some(g), _) => g.points(),
                (None, x) => x.iter().copied().collect(),
            };
            greens(cli, xs, tau_grid.points(), *method, *envelope_constant)
        }
        Command::Volterra { xi, forcing, t_max, steps, scheme } => {
            let eq = equilibrium(cli)?;
            let forcing = ForcingSpec::from_json(&read(forcing)?)?;
            let g = solve_volterra_with(&eq, &forcing, [*xi, 0.0, 0.0], *t_max, *steps, (*scheme).into())?;
            let mut table = Table::new(&["t", "re_rho", "im_rho", "re_h", "im_h"]);
            for (t, (r, h)) in g.times().into_iter().zip(g.rho_hat.iter().zip(&g.h_hat)) {
                table.push(vec![t.into(), r.re.into(), r.im.into(), h.re.into(), h.im.into()]);
            }
            write_table(cli, &table)
        }
        Command::ForcingDecay { forcing, times } => {
            let ForcingSpec::FreeStreaming(f0) = ForcingSpec::from_json(&read(forcing)?)? else {
                return Err(Failure::Usage("forcing-decay needs a free_streaming forcing".into()));
            };
            if times.iter().any(|t| !(*t > 0.0)) {
                return Err(Failure::Usage("decay times must be positive".into()));
            }
            let (_, rep) = free_streaming_forcing(&f0, &[], [1.0, 0.0, 0.0], times)?;
            let mut table = Table::new(&["t", "sup_h"]);
            for (t, s) in rep.times.iter().zip(&rep.sup_norms) {
                table.push(vec![(*t).into(), (*s).into()]);
            }
            write_table(cli, &table)?;
            if let Some(p) = rep.exponent {
                eprintln!("fitted decay exponent {}", -p);
            }
            Ok(())
        }
        Command::Validate { acceptance } => validate(cli, *acceptance),
    }
}

fn penrose(cli: &Cli, probes: &[f64], curve: bool) -> Outcome {
    let eq = equilibrium(cli)?;
    let rep = penrose_check(&eq, probes)?;
    let table = if curve {
        let mut t = Table::new(&["x", "re_k", "im_k"]);
        for (x, k) in &rep.curve_samples {
            t.push(vec![(*x).into(), k.re.into(), k.im.into()]);
        }
        t
    } else {
        let mut t = Table::new(&["probe", "winding"]);
        for (p, w) in &rep.winding_numbers {
            t.push(vec![(*p).into(), (*w).into()]);
        }
        t
    };
    write_table(cli, &table)
}

fn greens(cli: &Cli, xs: Vec<f64>, taus: Vec<f64>, method: GreensMethod, envelope: Option<f64>) -> Outcome {
    let eq = equilibrium(cli)?;
    if let Some(x) = xs.iter().find(|x| **x <= 0.0) {
        return Err(Failure::Usage(format!("xi must be > 0, grid contains {x}")));
    }
    let low_regime = landau_core::dispersion_relation::default_r1(&eq) / 3.0;
    let per_xi = |x: f64| -> Result<Vec<(GreensValue, &'static str, Option<f64>)>, Error> {
        let choice = match method {
            GreensMethod::Auto if x <= low_regime => GreensMethod::Low,
            GreensMethod::Auto => GreensMethod::High,
            m => m,
        };
        match choice {
            GreensMethod::Closed => {
                let j = eq.poisson_index().ok_or_else(|| Error::InvalidArgument("closed form needs a generalized Poisson equilibrium".into()))?;
                taus.iter().map(|&t| Ok((greens_closed_form(j, x, t)?, "closed", None))).collect()
            }
            GreensMethod::High => {
                let mut h = HighFrequencyContour::new(&eq, x, None)?;
                if let Some(c) = envelope {
                    h = h.with_envelope_constant(c);
                }
                taus.iter().map(|&t| h.eval(t).map(|v| (v, "high", Some(h.envelope_ratio(&v))))).collect()
            }
            GreensMethod::Low => {
                let mut l = LowFrequencyContour::new(&eq, x)?;
                if let Some(c) = envelope {
                    l = l.with_envelope_constant(c);
                }
                taus.iter().map(|&t| l.eval(t).map(|v| (v, "low", Some(l.envelope_ratio(&v, false))))).collect()
            }
            _ => taus.iter().map(|&t| Ok((greens_real_line(&eq, x, t)?, "real_line", None))).collect(),
        }
    };
    let blocks = xs.par_iter().map(|&x| per_xi(x)).collect::<Result<Vec<_>, Error>>()?;
    let mut table = Table::new(&["xi", "tau", "smooth", "oscillatory", "error", "envelope_ratio", "method"]);
    for (v, m, ratio) in blocks.into_iter().flatten() {
        let (osc, err) = v.decomposition.map_or((f64::NAN, f64::NAN), |d| (d.oscillatory, d.error));
        table.push(vec![v.xi_abs.into(), v.tau.into(), v.smooth.into(), osc.into(), err.into(), ratio.unwrap_or(f64::NAN).into(), Cell::from(m)]);
    }
    write_table(cli, &table)
}

fn check_rows(table: &mut Table, group: &str, checks: &[Check]) {
    for c in checks {
        let status = if c.informational { "info" } else if c.passed { "pass" } else { "fail" };
        table.push(vec![group.into(), c.name.clone().into(), status.into(), c.detail.clone().into()]);
    }
}

fn validate(cli: &Cli, acceptance: bool) -> Outcome {
    let mut table = Table::new(&["suite", "check", "status", "detail"]);
    let (passed, text) = if acceptance {
        let all = validation::all_criteria();
        for c in &all {
            check_rows(&mut table, &format!("criterion {}", c.id), &c.checks);
        }
        let json = serde_json::to_string_pretty(&all).expect("reports serialize");
        (all.iter().all(|c| c.passed), json)
    } else {
        let eq = equilibrium(cli)?;
        let rep = validation::validate_equilibrium(&eq);
        for s in &rep.suites {
            check_rows(&mut table, s.suite, &s.checks);
        }
        let json = serde_json::to_string_pretty(&rep).expect("reports serialize");
        (rep.passed(), json)
    };
    match cli.common.format {
        Format::Csv => write_table(cli, &table)?,
        Format::Json => write(cli, &(text + "\n"))?,
    }
    if passed {
        Ok(())
    } else {
        let failed = table.rows.iter().filter(|r| r[2] == Cell::from("fail")).count();
        Err(Failure::Check(format!("{failed} check(s) failed")))
    }
}
