use logimath::logistic::{
    linearize, residual_with_delta, two_exp_delta, EquationRegistry, LogisticModel,
    ResidualOptions, TricomiNormalization,
};
use logimath::ode::{
    fel_amplitude, fel_logistic_field, integrate, pack_complex, unpack_complex, DoubledReal,
    FelParams, FnSystem, LinearizedSystem,
};
use logimath::pde::{fisher_residual, laguerre_heat_fd, Branch, FisherParams, PolyInitialData};
use logimath::residual::{assemble_report, numeric_derivative, ReportMeta};
use logimath::special_fn::tricomi_series;
use logimath::{DerivativeMode, Grid, SeriesPolicy, Verdict};
use num_complex::Complex64;
use proptest::prelude::*;

fn policy() -> SeriesPolicy {
    SeriesPolicy::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tricomi_positive_and_increasing(nu in -0.9f64..6.0, y in 0.0f64..40.0, dy in 1e-3f64..2.0) {
        let a = tricomi_series(nu, y, &policy()).unwrap();
        let b = tricomi_series(nu, y + dy, &policy()).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!(b > a);
    }

    #[test]
    fn tricomi_derivative_shifts_order(nu in -0.5f64..4.0, y in 0.2f64..10.0) {
        let f = |t: f64| tricomi_series(nu, t, &policy()).unwrap();
        let d = numeric_derivative(&f, y, 1, 1e-3).unwrap().value;
        let e = tricomi_series(nu + 1.0, y, &policy()).unwrap();
        prop_assert!((d - e).abs() <= 1e-8 * e.max(1.0));
    }

    #[test]
    fn normalized_families_stay_in_unit_interval(mu in 1e-3f64..1e3, r in 0.05f64..3.0, x in -8.0f64..8.0) {
        // 1 − Z against the part of the denominator that makes it so; below
        // machine epsilon Z rounds to 1
        let n = 1.0 + r;
        let models = [
            (LogisticModel::normalized(mu, r).unwrap(), mu * (-r * x).exp()),
            (LogisticModel::cosh_lc(mu, r).unwrap(), mu),
            (LogisticModel::richards(mu, r, n).unwrap(), mu * (-n * r * x).exp() / n),
        ];
        for (m, gap) in &models {
            let z = m.evaluate(x, &policy()).unwrap();
            prop_assert!(z > 0.0 && z <= 1.0, "{}: {z}", m.label());
            prop_assert!(z < 1.0 || *gap < f64::EPSILON, "{}: {z}", m.label());
        }
        let lag = LogisticModel::laguerre(mu, r, 1.5, TricomiNormalization::Gamma).unwrap();
        let z = lag.evaluate(x.abs(), &policy()).unwrap();
        prop_assert!(z > 0.0 && z < 1.0);
    }

    #[test]
    fn common_anchor_at_origin(mu in 1e-2f64..1e3, r in 0.1f64..3.0, nu in 0.0f64..5.0) {
        let expected = 1.0 / (1.0 + mu);
        for m in [
            LogisticModel::normalized(mu, r).unwrap(),
            LogisticModel::cosh_lc(mu, r).unwrap(),
            LogisticModel::laguerre(mu, r, nu, TricomiNormalization::Gamma).unwrap(),
        ] {
            let z = m.evaluate(0.0, &policy()).unwrap();
            prop_assert!((z - expected).abs() <= 1e-14 * expected.max(1e-3), "{}", m.label());
        }
    }

    #[test]
    fn increasing_families(mu in 1e-2f64..1e2, r in 0.1f64..2.0, x in 0.0f64..6.0) {
        let dx = 0.05;
        for m in [
            LogisticModel::normalized(mu, r).unwrap(),
            LogisticModel::richards(mu, r, 2.5).unwrap(),
            LogisticModel::laguerre(mu, r, 0.5, TricomiNormalization::Raw).unwrap(),
        ] {
            let a = m.evaluate(x, &policy()).unwrap();
            let b = m.evaluate(x + dx, &policy()).unwrap();
            prop_assert!(b > a, "{} at {x}", m.label());
        }
    }

    #[test]
    fn report_invariants(values in prop::collection::vec(-1e3f64..1e3, 1..50), tol in 0.0f64..500.0) {
        let r = assemble_report(values, tol, ReportMeta::new("m", "e", DerivativeMode::Analytic)).unwrap();
        prop_assert!(r.max_norm >= 0.0);
        prop_assert!(r.l2_norm <= r.max_norm);
        prop_assert_eq!(r.verdict == Verdict::Pass, r.max_norm <= tol);
    }

    #[test]
    fn delta_closes_exponential_capacity(mu in 0.1f64..5.0, r1 in 0.2f64..2.0, r2 in 0.2f64..2.0) {
        let m = LogisticModel::two_exponential(mu, 1.0, r1, 1.0, r2).unwrap();
        let grid = Grid::uniform(-2.0, 6.0, 41).unwrap();
        let reg = EquationRegistry::builtin();
        let r = reg.check("two-exponential", &m, &grid, &ResidualOptions::default()).unwrap();
        prop_assert!(r.passed(), "{}", r.max_norm);
        let delta = two_exp_delta(mu, r1, r2).unwrap();
        let same = residual_with_delta(&m, &grid, delta, &ResidualOptions::default()).unwrap();
        prop_assert!(same.max_norm <= 1e-8);
    }

    #[test]
    fn fisher_dispersion_and_closure(mu in 0.1f64..10.0, alpha in 0.1f64..5.0, negative in any::<bool>()) {
        let branch = if negative { Branch::Negative } else { Branch::Positive };
        let p = FisherParams::new(mu, alpha, branch).unwrap();
        prop_assert!((p.k() * p.k() * 6.0 * alpha / mu - 1.0).abs() < 1e-14);
        let grid = Grid::uniform(-10.0, 10.0, 41).unwrap();
        let r = fisher_residual(&p, &grid, &[0.0, 0.5, 1.0]).unwrap();
        prop_assert!(r.passed(), "{}", r.max_norm);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn heat_fd_stays_nonnegative(coeffs in prop::collection::vec(0.0f64..2.0, 1..5), t in 0.05f64..0.5) {
        let g = PolyInitialData::new(coeffs).unwrap();
        let grid = Grid::uniform(0.0, 5.0, 101).unwrap();
        let out = laguerre_heat_fd(&g.field(&grid).unwrap(), t, 5e-3).unwrap();
        prop_assert!(out.values.iter().all(|v| *v >= -1e-10));
    }

    #[test]
    fn fel_inversion_identity(nu in -1.0f64..1.0, g0 in 0.2f64..2.0, re in 1e-4f64..1e-2, im in -1e-2f64..1e-2) {
        let p = FelParams::new(nu, g0, Complex64::new(re, im), Complex64::new(1.0, 0.0)).unwrap();
        let traj = fel_amplitude(&p, 6.0, 1e-10).unwrap();
        let field = fel_logistic_field(&traj.nodes, &p).unwrap();
        prop_assert!(field.inversion_error <= 1e-10, "{}", field.inversion_error);
    }

    #[test]
    fn doubled_real_matches_complex(w in -3.0f64..3.0, damp in 0.0f64..1.0) {
        let rate = Complex64::new(-damp, w);
        let sys = FnSystem::new(1, move |_t, y: &[Complex64], dy: &mut [Complex64]| {
            dy[0] = rate * y[0];
            Ok(())
        });
        let y0 = [Complex64::new(1.0, 0.5)];
        let native = integrate(&sys, &y0, (0.0, 2.0), 1e-10).unwrap();
        let doubled = integrate(&DoubledReal::new(&sys), &pack_complex(&y0), (0.0, 2.0), 1e-10).unwrap();
        let back = unpack_complex(doubled.final_state());
        prop_assert!((back[0] - native.final_state()[0]).norm() <= 1e-12);
    }

    #[test]
    fn linearization_round_trip(mu in 0.5f64..5.0, r in 0.2f64..1.5, n in 1.0f64..3.0) {
        let model = LogisticModel::richards(mu, r, n).unwrap();
        let desc = linearize(&model).unwrap();
        let traj = integrate(&LinearizedSystem::new(&desc), &[desc.initial.1], (0.0, 5.0), 1e-12).unwrap();
        for (x, y) in &traj.nodes {
            let z = model.evaluate(*x, &policy()).unwrap();
            prop_assert!((desc.inverse(y[0]) - z).abs() <= 1e-8);
        }
    }
}
