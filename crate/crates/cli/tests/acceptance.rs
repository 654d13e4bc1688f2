//! Acceptance criteria 1–10, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the report is always
//! printed; the process exits with status 1 if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;

use logimath::logistic::{
    asymptotes, linearize, two_exp_delta, variable_rate_solution, EquationRegistry, Limit,
    LogisticModel, RateFn, ResidualOptions, TricomiNormalization,
};
use logimath::ode::{
    fel_amplitude, fel_logistic_field, fel_trajectory_residual, integrate,
    linear_counterpart_residual, FelParams, LinearizedSystem, ModelSystem,
};
use logimath::pde::{
    fisher_front_speed, fisher_literal_residual, fisher_residual, hopf_cole_u,
    laguerre_burgers_residual, laguerre_heat_exact, laguerre_heat_fd, laguerre_heat_fd_with,
    laguerre_heat_poly, log_potential_residual, Branch, Field1D, FisherParams, HeatOptions,
    PolyInitialData,
};
use logimath::special_fn::{eigen_residual, korf_residual, tricomi_series};
use logimath::{Grid, SeriesPolicy};
use logimath_cli::args::EvalArgs;
use logimath_cli::commands::{build_config, cmd_eval};
use logimath_cli::models::ModelRegistry;

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// I_0(z) = (1/π) ∫_0^π e^{z cos θ} dθ; the trapezoid rule is spectrally
/// accurate for this periodic integrand.
fn bessel_i0(z: f64) -> f64 {
    let n = 400;
    let h = PI / n as f64;
    let mut sum = 0.5 * (z.exp() + (-z).exp());
    for j in 1..n {
        sum += (z * (j as f64 * h).cos()).exp();
    }
    sum * h / PI
}

fn criterion_1() -> Outcome {
    let policy = SeriesPolicy::default();
    let mut worst: f64 = 0.0;
    for j in 0..200 {
        let x = 10.0 * j as f64 / 199.0;
        let oracle = bessel_i0(2.0 * x.sqrt());
        let e0 = tricomi_series(0.0, x, &policy).map_err(err)?;
        worst = worst.max(((e0 - oracle) / oracle).abs());
    }
    Ok((
        worst <= 1e-12,
        format!("max rel deviation {worst:.3e} over 200 points (<= 1e-12)"),
    ))
}

fn criterion_2() -> Outcome {
    let policy = SeriesPolicy::default();
    let grid = Grid::uniform(0.5, 5.0, 46).map_err(err)?;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for nu in [0.0, 1.0, 3.5] {
        for lambda in [0.5, 1.0, 2.0] {
            let r = eigen_residual(nu, lambda, &grid, &policy, 1e-6).map_err(err)?;
            ok &= r.passed();
            worst = worst.max(r.max_norm);
        }
    }
    let mut korf_worst: f64 = 0.0;
    for alpha in [1.0, 2.0, 0.5] {
        let r = korf_residual(1.0, alpha, &grid, &policy, 1e-6).map_err(err)?;
        ok &= r.passed();
        korf_worst = korf_worst.max(r.max_norm);
    }
    Ok((
        ok,
        format!("eigen max {worst:.3e} (9 pairs), korf max {korf_worst:.3e} (3 pairs), tol 1e-6"),
    ))
}

fn criterion_3() -> Outcome {
    let reg = EquationRegistry::builtin();
    let line = Grid::uniform(-3.0, 3.0, 61).map_err(err)?;
    let positive = Grid::uniform(0.5, 6.0, 56).map_err(err)?;
    let raw = TricomiNormalization::Raw;
    // Δ for the two-exponential family comes from two_exp_delta(μ c2, r1, r2)
    let delta = two_exp_delta(1.0, 1.0, 2.0).map_err(err)?;
    let cases: Vec<(&str, LogisticModel, &Grid)> = vec![
        (
            "canonical",
            LogisticModel::normalized(99.0, 1.0).map_err(err)?,
            &line,
        ),
        (
            "two-exponential",
            LogisticModel::two_exponential(1.0, 1.0, 1.0, 1.0, 2.0).map_err(err)?,
            &line,
        ),
        (
            "richards",
            LogisticModel::richards(1.0, 1.0, 2.0).map_err(err)?,
            &line,
        ),
        (
            "forestry",
            LogisticModel::forestry(0.5, 2.0, 1.0, 1.0, 1.0, 2.0).map_err(err)?,
            &line,
        ),
        (
            "cosh-damped",
            LogisticModel::cosh_lc(1.0, 1.0).map_err(err)?,
            &line,
        ),
        (
            "double-exponential",
            LogisticModel::two_exponential(1.0, 1.0, 1.0, 1.0, 2.0).map_err(err)?,
            &line,
        ),
        (
            "theorem-3.1",
            LogisticModel::laguerre(1.0, 1.0, 0.0, raw).map_err(err)?,
            &positive,
        ),
        (
            "theorem-3.2",
            LogisticModel::laguerre(1.0, 1.0, 3.5, raw).map_err(err)?,
            &positive,
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, model, grid) in &cases {
        let analytic = reg
            .check(name, model, grid, &ResidualOptions::default())
            .map_err(err)?;
        let fd = reg
            .check(name, model, grid, &ResidualOptions::finite_difference())
            .map_err(err)?;
        ok &= analytic.max_norm <= 1e-8 && fd.max_norm <= 1e-5;
        parts.push(format!(
            "{name} {:.1e}/{:.1e}",
            analytic.max_norm, fd.max_norm
        ));
    }
    Ok((
        ok,
        format!(
            "analytic/fd max (<= 1e-8 / 1e-5): {}; delta={delta:.6}",
            parts.join(", ")
        ),
    ))
}

fn criterion_4() -> Outcome {
    let (f0, r, k) = (1.0, 1.0, 100.0);
    let model = LogisticModel::classical(f0, r, k).map_err(err)?;
    let closed = k * 10f64.exp() / (k + f0 * (10f64.exp() - 1.0));
    let direct = integrate(
        &ModelSystem::new(&model).map_err(err)?,
        &[f0],
        (0.0, 10.0),
        1e-12,
    )
    .map_err(err)?;
    let direct = direct.final_state()[0];
    let desc = linearize(&model).map_err(err)?;
    let lin = integrate(
        &LinearizedSystem::new(&desc),
        &[desc.initial.1],
        (0.0, 10.0),
        1e-13,
    )
    .map_err(err)?;
    let linear = desc.inverse(lin.final_state()[0]);
    let vr = variable_rate_solution(
        &RateFn::constant(r),
        &RateFn::constant(r / k),
        f0,
        10.0,
        1e-13,
    )
    .map_err(err)?;
    let d1 = (direct - closed).abs();
    let d2 = (linear - direct).abs();
    let d3 = (vr - direct).abs().max((vr - linear).abs());
    Ok((
        d1 <= 1e-8 && d2 <= 1e-8 && d3 <= 1e-9,
        format!("|direct-closed| {d1:.2e} (1e-8), |linear-direct| {d2:.2e} (1e-8), |variable-rate - both| {d3:.2e} (1e-9)"),
    ))
}

fn criterion_5() -> Outcome {
    let grid = Grid::uniform(0.0, 6.0, 121).map_err(err)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (mu, r, n) in [(3.0, 1.0, 2.0), (1.0, 0.5, 3.0)] {
        let model = LogisticModel::richards(mu, r, n).map_err(err)?;
        let rep = linear_counterpart_residual(&model, &grid, 1e-13, 1e-8).map_err(err)?;
        ok &= rep.passed();
        let printed = rep
            .meta
            .notes
            .iter()
            .find(|n| n.contains("r/n"))
            .cloned()
            .unwrap_or_default();
        ok &= !printed.is_empty();
        parts.push(format!(
            "({mu},{r},{n}) max {:.2e} [{printed}]",
            rep.max_norm
        ));
    }
    Ok((
        ok,
        format!("Y' + n r (Y-1) residual (<= 1e-8): {}", parts.join("; ")),
    ))
}

/// RMS of `fd - exact` over `x <= lim`.
fn interior_rms(fd: &Field1D, exact: impl Fn(f64) -> f64, lim: f64) -> f64 {
    let errs: Vec<f64> = fd
        .grid
        .iter()
        .zip(&fd.values)
        .filter(|(x, _)| *x <= lim)
        .map(|(x, v)| v - exact(x))
        .collect();
    (errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64).sqrt()
}

fn criterion_6() -> Outcome {
    let (t, dt, length, interior) = (0.25, 1e-3, 20.0, 4.0);
    let mut ok = true;
    let mut parts = Vec::new();
    let mut orders = 0;
    for k in 0..4 {
        let g = PolyInitialData::monomial(k);
        let exact = |x: f64| laguerre_heat_exact(&g, t, x);
        let mut errs = Vec::new();
        for h in [0.02, 0.01] {
            let grid =
                Grid::uniform(0.0, length, (length / h).round() as usize + 1).map_err(err)?;
            let fd = laguerre_heat_fd(&g.field(&grid).map_err(err)?, t, dt).map_err(err)?;
            errs.push(interior_rms(&fd, exact, interior));
        }
        ok &= errs[0] <= 1e-2;
        // Bessel-kernel series against the exponential kernel, for the record
        let kernel_gap = (0..=40)
            .map(|j| {
                let x = interior * j as f64 / 40.0;
                (laguerre_heat_poly(&g, t, x) - exact(x)).abs()
            })
            .fold(0.0, f64::max);
        // below this the error is rounding and carries no order
        if errs[0] > 1e-9 {
            let order = (errs[0] / errs[1]).log2();
            ok &= (1.7..=2.3).contains(&order);
            orders += 1;
            parts.push(format!(
                "x^{k}: L2 {:.2e} order {order:.2} e0-kernel gap {kernel_gap:.1e}",
                errs[0]
            ));
        } else {
            parts.push(format!(
                "x^{k}: L2 {:.2e} (rounding) e0-kernel gap {kernel_gap:.1e}",
                errs[0]
            ));
        }
    }
    ok &= orders > 0;
    Ok((
        ok,
        format!(
            "vs e^(tL)g on [0,{interior}] (L2 <= 1e-2, order in [1.7,2.3]): {}",
            parts.join("; ")
        ),
    ))
}

fn exact_stack(g: &PolyInitialData, grid: &Grid, t: f64, dt: f64) -> Result<Vec<Field1D>, String> {
    let steps = (t / dt).round() as usize;
    (0..=steps)
        .map(|k| {
            let tk = k as f64 * dt;
            Field1D::from_fn(grid.clone(), tk, |x| laguerre_heat_exact(g, tk, x)).map_err(err)
        })
        .collect()
}

fn transforms(stack: &[Field1D], dt: f64) -> Result<(f64, f64), String> {
    let u = stack
        .iter()
        .map(hopf_cole_u)
        .collect::<logimath::Result<Vec<_>>>()
        .map_err(err)?;
    let burgers = laguerre_burgers_residual(&u, dt, 1e-6).map_err(err)?;
    let log = log_potential_residual(stack, dt, 1e-6).map_err(err)?;
    Ok((burgers.max_norm, log.max_norm))
}

fn criterion_7() -> Outcome {
    let g = PolyInitialData::new(vec![1.0, 1.0]).map_err(err)?;
    // u = 1/(x+t+1) is not polynomial: h = 0.01 and dt = 1e-4 keep the
    // stencil and centred-time errors near 1e-8 (dt = 1e-3 alone costs 1e-6)
    let grid = Grid::uniform(0.0, 4.0, 401).map_err(err)?;
    let (b, l) = transforms(&exact_stack(&g, &grid, 0.1, 1e-4)?, 1e-4)?;
    let mut ok = b <= 1e-6 && l <= 1e-6;

    // FD stacks: L = 20, g = 1 + x + x^2, residual on x in [0.5, 4]
    let g = PolyInitialData::new(vec![1.0, 1.0, 1.0]).map_err(err)?;
    let mut levels = Vec::new();
    for (h, dt) in [(0.04, 2e-3), (0.02, 1e-3), (0.01, 5e-4)] {
        let grid = Grid::uniform(0.0, 20.0, (20.0_f64 / h).round() as usize + 1).map_err(err)?;
        let opts = HeatOptions {
            save_every: 1,
            ..Default::default()
        };
        let run =
            laguerre_heat_fd_with(&g.field(&grid).map_err(err)?, 0.1, dt, &opts).map_err(err)?;
        let stack = run
            .slices
            .iter()
            .map(|s| s.window(0.5, 4.0))
            .collect::<logimath::Result<Vec<_>>>()
            .map_err(err)?;
        levels.push(transforms(&stack, run.dt)?);
    }
    let ratios: Vec<(f64, f64)> = levels
        .windows(2)
        .map(|w| (w[0].0 / w[1].0, w[0].1 / w[1].1))
        .collect();
    ok &= ratios.iter().all(|(rb, rl)| *rb >= 3.5 && *rl >= 3.5);
    let fmt = |v: &[(f64, f64)], i: usize| {
        v.iter()
            .map(|p| format!("{:.2e}", if i == 0 { p.0 } else { p.1 }))
            .collect::<Vec<_>>()
            .join(" -> ")
    };
    Ok((
        ok,
        format!(
            "exact F=x+t+1: burgers {b:.1e}, log {l:.1e} (<= 1e-6); FD burgers {} ratios {:.2}/{:.2}, log {} ratios {:.2}/{:.2} (>= 3.5)",
            fmt(&levels, 0),
            ratios[0].0,
            ratios[1].0,
            fmt(&levels, 1),
            ratios[0].1,
            ratios[1].1
        ),
    ))
}

fn criterion_8() -> Outcome {
    let grid = Grid::uniform(-10.0, 10.0, 201).map_err(err)?;
    let times = [0.0, 0.5, 1.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for (mu, alpha) in [(6.0, 1.0), (1.0, 1.0), (2.0, 0.5)] {
        let p = FisherParams::new(mu, alpha, Branch::Positive).map_err(err)?;
        let rep = fisher_residual(&p, &grid, &times).map_err(err)?;
        let speed = fisher_front_speed(&p, &times, (-10.0, 10.0)).map_err(err)?;
        let expected = 5.0 * alpha * p.k().abs();
        let rel = (speed.abs() - expected).abs() / expected;
        let literal = fisher_literal_residual(&p, &grid, &times).map_err(err)?;
        ok &= rep.max_norm <= 1e-6 && rel <= 0.01;
        parts.push(format!(
            "({mu},{alpha}) residual {:.1e} speed {:.4} vs {expected:.4} ({:.2}%) literal {:.2e}",
            rep.max_norm,
            speed.abs(),
            100.0 * rel,
            literal.max_norm
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_9() -> Outcome {
    let g0 = 1.0;
    let p = FelParams::new(0.0, g0, Complex64::new(1e-3, 0.0), Complex64::new(1.0, 0.0))
        .map_err(err)?;
    let tau_end = 15.0 * (PI * g0).powf(-1.0 / 3.0);
    let traj = fel_amplitude(&p, tau_end, 1e-12).map_err(err)?;

    // a(τ) = Σ (iπg₀τ³)^k / (3k)! at ν = 0
    let tau = 0.1;
    let a = traj.at(tau).map_err(err)?[0];
    let z = Complex64::new(0.0, PI * g0 * tau.powi(3));
    let (mut series, mut term) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    for k in 0..8 {
        series += term;
        let n = 3.0 * k as f64;
        term = term * z / ((n + 1.0) * (n + 2.0) * (n + 3.0));
    }
    let series_dev = (a - series).norm();
    let cubic_dev = (a - (1.0 + z / 6.0)).norm();

    let end = traj.final_state();
    let measured = (end[1] / end[0]).re;
    let target = 3f64.sqrt() / 2.0 * (PI * g0).powf(1.0 / 3.0);
    let rate_rel = (measured - target).abs() / target;

    let samples = Grid::uniform(0.0, tau_end, 301).map_err(err)?;
    let rows = traj.sample(samples.points()).map_err(err)?;
    let field = fel_logistic_field(&rows, &p).map_err(err)?;
    let diag = fel_trajectory_residual(&traj, &p, &Grid::uniform(0.0, 10.0, 201).map_err(err)?)
        .map_err(err)?;
    let ok = series_dev <= 1e-8 && rate_rel <= 0.02 && field.inversion_error <= 1e-10;
    Ok((
        ok,
        format!(
            "a(0.1) vs series {series_dev:.2e} (1e-8), vs 1+i pi g0 tau^3/6 {cubic_dev:.2e} (tau^6 term {:.2e}); \
             rate {measured:.5} vs {target:.5} ({:.3}%); inversion {:.1e} (1e-10); field equation {} [{}]",
            (z * z / 720.0).norm(),
            100.0 * rate_rel,
            field.inversion_error,
            diag.verdict_line(),
            diag.meta.notes.join("; ")
        ),
    ))
}

fn eval_rows(
    model: Option<&str>,
    compare: Option<&str>,
    params: &str,
    grid: &str,
) -> Result<Vec<Vec<f64>>, String> {
    let args = EvalArgs {
        model: model.map(str::to_string),
        compare: compare.map(str::to_string),
        params: Some(params.to_string()),
        grid: Some(grid.to_string()),
    };
    let cfg = build_config(&args, None).map_err(err)?;
    let out = cmd_eval(&cfg, &ModelRegistry::builtin()).map_err(err)?;
    out.data
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|c| c.parse::<f64>().map_err(err))
                .collect()
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (r1, r2) in [(1.0, 2.0), (0.5, 1.0), (2.0, 0.5)] {
        let rows = eval_rows(
            Some("two-exponential"),
            None,
            &format!("mu=1,r1={r1},r2={r2}"),
            "-10:50:601",
        )?;
        let end = rows.last().unwrap()[1];
        let model = LogisticModel::two_exponential(1.0, 1.0, r1, 1.0, r2).map_err(err)?;
        let limit_ok = asymptotes(&model).1 == Limit::Finite(1.0);
        ok &= (end - 1.0).abs() < 1e-9 && limit_ok;
        parts.push(format!("({r1},{r2}) Z(50)={end:.12}"));
    }
    for (r1, r2) in [(1.0, -0.2), (-0.2, 1.0)] {
        let rows = eval_rows(
            Some("two-exponential"),
            None,
            &format!("mu=1,r1={r1},r2={r2}"),
            "-10:50:601",
        )?;
        let end = rows.last().unwrap()[1];
        let model = LogisticModel::two_exponential(1.0, 1.0, r1, 1.0, r2).map_err(err)?;
        let limit = asymptotes(&model).1;
        ok &= end < 1e-3 && limit == Limit::Finite(0.0);
        parts.push(format!("({r1},{r2}) Z(50)={end:.3e} limit {limit}"));
    }

    let fig2 = || {
        eval_rows(
            None,
            Some("classical,laguerre,laguerre-nu"),
            "a=1,lambda=1,K=100,nu=3.5",
            "0:30:301",
        )
    };
    let (first, second) = (fig2()?, fig2()?);
    let at5 = &first[50];
    let ordered = at5[0] == 5.0 && at5[1] > at5[2] && at5[2] > at5[3];
    ok &= ordered && first == second && first[0][1..].iter().all(|v| (v - 1.0).abs() < 1e-12);
    parts.push(format!(
        "K=100 curves at x=5: classical {:.4} > laguerre {:.4} > laguerre-nu {:.4}, runs identical: {}",
        at5[1],
        at5[2],
        at5[3],
        first == second
    ));
    Ok((ok, parts.join("; ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Bessel identity", criterion_1),
        ("eigenvalue suites", criterion_2),
        ("governing-equation closure", criterion_3),
        ("integrator cross-check", criterion_4),
        ("Richards linearization", criterion_5),
        ("Laguerre heat", criterion_6),
        ("Hopf-Cole", criterion_7),
        ("Fisher wave", criterion_8),
        ("FEL", criterion_9),
        ("figure data", criterion_10),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!passed);
        println!(
            "criterion {:>2} {}: {name}: {detail}",
            i + 1,
            if passed { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} of 10 passed in {:.1?}",
        10 - failed,
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
