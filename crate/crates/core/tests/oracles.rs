//! Library results against oracles computed independently in the test.

use std::f64::consts::{E, PI};

use logimath::logistic::{
    variable_rate_solution, EquationRegistry, LogisticModel, RateFn, ResidualOptions,
};
use logimath::ode::{fel_gain_rate, integrate, FelParams, ModelSystem};
use logimath::pde::{
    hopf_cole_u, laguerre_burgers_residual, laguerre_heat_exact, laguerre_heat_poly,
    log_potential_residual, Field1D, PolyInitialData,
};
use logimath::residual::numeric_derivative;
use logimath::special_fn::{gamma_real, tricomi_series};
use logimath::{Grid, SeriesPolicy};
use num_complex::Complex64;

/// I_0(z) = (1/π) ∫_0^π e^{z cos θ} dθ by the trapezoid rule, which is
/// spectrally accurate for this periodic integrand.
fn bessel_i0_quadrature(z: f64) -> f64 {
    let n = 400;
    let h = PI / n as f64;
    let mut sum = 0.5 * (z.exp() + (-z).exp());
    for j in 1..n {
        sum += (z * (j as f64 * h).cos()).exp();
    }
    sum * h / PI
}

#[test]
fn zeroth_tricomi_is_modified_bessel() {
    let policy = SeriesPolicy::default();
    for j in 0..50 {
        let x = 10.0 * j as f64 / 49.0;
        let oracle = bessel_i0_quadrature(2.0 * x.sqrt());
        let e0 = tricomi_series(0.0, x, &policy).unwrap();
        assert!(((e0 - oracle) / oracle).abs() < 1e-13, "x = {x}");
    }
}

#[test]
fn gamma_reference_values() {
    assert!((gamma_real(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
    assert_eq!(gamma_real(5.0).unwrap(), 24.0);
    assert!((gamma_real(-1.5).unwrap() - 4.0 * PI.sqrt() / 3.0).abs() < 1e-13);
    assert!(gamma_real(0.0).is_err());
    assert!(gamma_real(-2.0).is_err());
}

#[test]
fn third_derivative_of_exponential() {
    let d = numeric_derivative(&f64::exp, 1.0, 3, 1e-3).unwrap();
    assert!((d.value - E).abs() < 1e-5);
}

#[test]
fn classical_ode_reaches_closed_form() {
    let model = LogisticModel::classical(1.0, 1.0, 100.0).unwrap();
    let traj = integrate(
        &ModelSystem::new(&model).unwrap(),
        &[1.0],
        (0.0, 10.0),
        1e-12,
    )
    .unwrap();
    let closed = 100.0 * E.powi(10) / (100.0 + E.powi(10) - 1.0);
    assert!((traj.final_state()[0] - closed).abs() < 1e-8);
}

#[test]
fn variable_rate_examples() {
    let f = variable_rate_solution(
        &RateFn::new(|t| 1.0 + t),
        &RateFn::constant(0.0),
        1.0,
        1.0,
        1e-12,
    )
    .unwrap();
    assert!((f - 1.5f64.exp()).abs() < 1e-10);
    let g = variable_rate_solution(
        &RateFn::constant(1.0),
        &RateFn::constant(0.01),
        1.0,
        5.0,
        1e-13,
    )
    .unwrap();
    let closed = 100.0 * 5f64.exp() / (99.0 + 5f64.exp());
    assert!((g - closed).abs() < 1e-9);
}

#[test]
fn every_catalogue_pair_closes() {
    let reg = EquationRegistry::builtin();
    let grid = Grid::uniform(-3.0, 3.0, 61).unwrap();
    let positive = Grid::uniform(0.5, 6.0, 56).unwrap();
    let cases = [
        (
            "canonical",
            LogisticModel::normalized(99.0, 1.0).unwrap(),
            &grid,
        ),
        (
            "two-exponential",
            LogisticModel::two_exponential(1.0, 1.0, 1.0, 1.0, 2.0).unwrap(),
            &grid,
        ),
        (
            "richards",
            LogisticModel::richards(1.0, 1.0, 2.0).unwrap(),
            &grid,
        ),
        (
            "forestry",
            LogisticModel::forestry(0.5, 2.0, 1.0, 1.0, 1.0, 2.0).unwrap(),
            &grid,
        ),
        (
            "cosh-damped",
            LogisticModel::cosh_lc(1.0, 1.0).unwrap(),
            &grid,
        ),
        (
            "double-exponential",
            LogisticModel::two_exponential(1.0, 1.0, 1.0, 1.0, 2.0).unwrap(),
            &grid,
        ),
    ];
    for (name, model, g) in cases {
        let r = reg
            .check(name, &model, g, &ResidualOptions::default())
            .unwrap();
        assert!(r.passed(), "{name}: {}", r.verdict_line());
    }
    let lag = LogisticModel::laguerre(1.0, 1.0, 0.0, logimath::logistic::TricomiNormalization::Raw)
        .unwrap();
    let r = reg
        .check(
            "theorem-3.1",
            &lag,
            &positive,
            &ResidualOptions::finite_difference(),
        )
        .unwrap();
    assert!(r.passed(), "{}", r.verdict_line());
}

#[test]
fn gain_rate_for_cube_of_two() {
    let p = FelParams::new(
        0.0,
        8.0 / PI,
        Complex64::new(1e-3, 0.0),
        Complex64::new(1.0, 0.0),
    )
    .unwrap();
    assert!((fel_gain_rate(&p) - 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn operational_solutions_of_quadratic_data() {
    let g = PolyInitialData::new(vec![0.0, 0.0, 1.0]).unwrap();
    for (x, t) in [(0.0, 0.3), (1.5, 0.25), (4.0, 1.0)] {
        // Bessel-kernel weights t^m/(m!)^2, exponential-kernel weights t^m/m!
        assert!((laguerre_heat_poly(&g, t, x) - (x * x + 4.0 * t * x + t * t)).abs() < 1e-13);
        assert!(
            (laguerre_heat_exact(&g, t, x) - (x * x + 4.0 * t * x + 2.0 * t * t)).abs() < 1e-13
        );
    }
}

#[test]
fn exact_laguerre_heat_slices_satisfy_both_transforms() {
    let g = PolyInitialData::new(vec![1.0, 2.0, 0.5]).unwrap();
    let grid = Grid::uniform(0.2, 3.0, 281).unwrap();
    let dt = 1e-4;
    let stack: Vec<Field1D> = (0..5)
        .map(|k| {
            let t = 0.1 + k as f64 * dt;
            Field1D::from_fn(grid.clone(), t, |x| laguerre_heat_exact(&g, t, x)).unwrap()
        })
        .collect();
    let u: Vec<Field1D> = stack.iter().map(|f| hopf_cole_u(f).unwrap()).collect();
    let burgers = laguerre_burgers_residual(&u, dt, 1e-6).unwrap();
    assert!(burgers.passed(), "{}", burgers.verdict_line());
    let logpot = log_potential_residual(&stack, dt, 1e-6).unwrap();
    assert!(logpot.passed(), "{}", logpot.verdict_line());
}
