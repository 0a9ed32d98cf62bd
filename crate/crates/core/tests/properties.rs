use std::sync::Arc;

use landau_core::dispersion_function::eval_k;
use landau_core::dispersion_relation::{dissipation_bracket, solve_zeta};
use landau_core::poisson_kernels::{kj_coefficients, poles};
use landau_core::report::GridSpec;
use landau_core::volterra::{greens_convolution, quadrature_weights, solve_volterra, ForcingSpec, GreensSource, Scheme};
use landau_core::{Complex64, RadialEquilibrium};
use num_traits::Signed;
use proptest::prelude::*;

fn equilibrium(idx: u32) -> RadialEquilibrium {
    match idx {
        0 => RadialEquilibrium::maxwellian(),
        j => RadialEquilibrium::generalized_poisson(j).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn k_reflects_across_imaginary_axis(idx in 0u32..4, x in -12.0f64..12.0, s in -0.99f64..0.99) {
        let eq = equilibrium(idx);
        let z = Complex64::new(x, s * eq.theta_prime() * (1.0 + x.abs()));
        let a = eval_k(&eq, z).unwrap().k;
        let c = eval_k(&eq, -z.conj()).unwrap().k;
        prop_assert!((a - c.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn poisson_frequency_is_exact(r in 1e-3f64..0.3) {
        let p = solve_zeta(&equilibrium(1), r).unwrap();
        prop_assert!((p.omega - Complex64::new(1.0, r)).norm() < 1e-12);
        prop_assert!(p.m_l.norm() < 1e-10);
    }

    #[test]
    fn dissipation_stays_bracketed(r in 0.1f64..0.25, idx in 2u32..4) {
        prop_assert!(dissipation_bracket(&equilibrium(idx), r).is_ok());
    }

    #[test]
    fn poles_are_stable(j in 1u32..9, xi in 0.01f64..0.05) {
        let set = poles(j, xi).unwrap();
        prop_assert_eq!(set.roots.len(), j as usize + 1);
        prop_assert!(set.check_stability().is_ok());
    }

    #[test]
    fn volterra_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, xi in 0.05f64..2.0, idx in 0u32..3) {
        let eq = equilibrium(idx);
        let f = |t: f64| Complex64::new((-(t - 2.0).powi(2)).exp(), 0.0);
        let g = |t: f64| Complex64::new(t.sin() / (1.0 + t * t), t.cos() * (-t).exp());
        let mix = ForcingSpec::Synthetic(Arc::new(move |t| a * f(t) + b * g(t)));
        let rf = solve_volterra(&eq, &ForcingSpec::Synthetic(Arc::new(f)), [xi, 0.0, 0.0], 10.0, 64).unwrap();
        let rg = solve_volterra(&eq, &ForcingSpec::Synthetic(Arc::new(g)), [xi, 0.0, 0.0], 10.0, 64).unwrap();
        let rm = solve_volterra(&eq, &mix, [xi, 0.0, 0.0], 10.0, 64).unwrap();
        prop_assert_eq!(rm.rho_hat[0], rm.h_hat[0]);
        for n in 0..=64 {
            let want = a * rf.rho_hat[n] + b * rg.rho_hat[n];
            prop_assert!((rm.rho_hat[n] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn delta_green_is_identity(values in proptest::collection::vec(-10.0f64..10.0, 1..40)) {
        let h: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, -v)).collect();
        prop_assert_eq!(greens_convolution(&GreensSource::DeltaOnly, 0.5, &h, 0.1).unwrap(), h);
    }

    #[test]
    fn weights_integrate_polynomials(n in 1usize..60) {
        for (scheme, degree) in [(Scheme::Trapezoid, 1), (Scheme::Gregory, if n >= 2 { 3 } else { 1 })] {
            let w = quadrature_weights(n, scheme);
            for p in 0..=degree {
                let sum: f64 = w.iter().enumerate().map(|(m, w)| w * (m as f64).powi(p)).sum();
                let exact = (n as f64).powi(p + 1) / (p + 1) as f64;
                prop_assert!((sum - exact).abs() <= 1e-9 * exact.max(1.0), "{:?} n={} p={}", scheme, n, p);
            }
        }
    }

    #[test]
    fn grid_strings_round_trip(a in -5.0f64..5.0, len in 0.0f64..5.0, n in 1usize..500) {
        let g: GridSpec = format!("{a}:{}:{n}", a + len).parse().unwrap();
        let pts = g.points();
        prop_assert_eq!(pts.len(), n);
        prop_assert_eq!(pts[0], a);
        if n > 1 {
            prop_assert!((pts[n - 1] - (a + len)).abs() <= 1e-12 * (1.0 + a.abs() + len));
        }
    }
}

#[test]
fn kernel_coefficients_are_positive_with_bounded_variance() {
    for j in 1..=8 {
        let k = kj_coefficients(j).unwrap();
        assert!(k.a.iter().all(|a| a.is_positive()));
        assert!((0.0..3.0).contains(&k.a2()));
    }
}
