use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use landau_core::dispersion_function::{eval_k, eval_k_quadrature};
use landau_core::dispersion_relation::solve_zeta;
use landau_core::greens_function::{greens_closed_form, HighFrequencyContour};
use landau_core::quadrature::QuadConfig;
use landau_core::volterra::{solve_volterra, solve_volterra_with, ForcingSpec, Scheme, SeparableKinetic};
use landau_core::{Complex64, RadialEquilibrium};

fn dispersion_function(c: &mut Criterion) {
    let z = Complex64::new(1.3, 0.2);
    let mut g = c.benchmark_group("eval_k");
    for (name, eq) in [("maxwellian", RadialEquilibrium::maxwellian()), ("gp2", RadialEquilibrium::generalized_poisson(2).unwrap())] {
        g.bench_with_input(BenchmarkId::new("closed_form", name), &eq, |b, eq| b.iter(|| eval_k(eq, black_box(z))));
        g.bench_with_input(BenchmarkId::new("quadrature", name), &eq, |b, eq| {
            b.iter(|| eval_k_quadrature(eq, black_box(z), &QuadConfig::default()))
        });
    }
    g.finish();
}

fn dispersion_relation(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_zeta");
    for (name, eq) in [("maxwellian", RadialEquilibrium::maxwellian()), ("gp3", RadialEquilibrium::generalized_poisson(3).unwrap())] {
        for r in [0.05, 0.2] {
            g.bench_with_input(BenchmarkId::new(name, r), &r, |b, &r| b.iter(|| solve_zeta(&eq, black_box(r))));
        }
    }
    g.finish();
}

fn greens(c: &mut Criterion) {
    let mut g = c.benchmark_group("greens");
    g.sample_size(20);
    g.bench_function("closed_form_gp3", |b| b.iter(|| greens_closed_form(3, black_box(1.0), 5.0)));
    let eq = RadialEquilibrium::maxwellian();
    let contour = HighFrequencyContour::new(&eq, 1.0, None).unwrap();
    g.bench_function("high_contour_maxwellian", |b| b.iter(|| contour.eval(black_box(5.0))));
    g.finish();
}

fn volterra(c: &mut Criterion) {
    let eq = RadialEquilibrium::generalized_poisson(2).unwrap();
    let forcing = ForcingSpec::FreeStreaming(SeparableKinetic::gaussian());
    let mut g = c.benchmark_group("solve_volterra");
    g.sample_size(10);
    for n in [256, 1024] {
        g.bench_with_input(BenchmarkId::new("trapezoid", n), &n, |b, &n| b.iter(|| solve_volterra(&eq, &forcing, [0.5, 0.0, 0.0], 20.0, n)));
        g.bench_with_input(BenchmarkId::new("gregory", n), &n, |b, &n| {
            b.iter(|| solve_volterra_with(&eq, &forcing, [0.5, 0.0, 0.0], 20.0, n, Scheme::Gregory))
        });
    }
    g.finish();
}

criterion_group!(benches, dispersion_function, dispersion_relation, greens, volterra);
criterion_main!(benches);
