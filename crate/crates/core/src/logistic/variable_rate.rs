use crate::error::{Error, Result};
use crate::quadrature::{integrate, panel_nodes, panel_rule};

use super::{RateFn, VariableRate};

const MAX_DEPTH: u32 = 40;

/// `(∫_0^x r, ∫_0^x e^{∫_0^t r} k(t) dt)`.
///
/// The outer integral is adaptive Gauss–Kronrod; the inner integral at each
/// outer node starts from the cached value at the left end of its panel
/// rather than from zero.
fn nested_integrals(rate: &RateFn, loss: &RateFn, x: f64, tol: f64) -> Result<(f64, f64)> {
    if x == 0.0 {
        return Ok((0.0, 0.0));
    }
    let r = |t: f64| rate.at(t);
    let first = outer_panel(&r, loss, 0.0, x, 0.0, tol)?;
    let target = tol * first.0 .0.abs().max(1.0);
    let (q, r_end) = refine(&r, loss, (0.0, x), 0.0, first, target, tol, 0)?;
    Ok((r_end, q))
}

type Panel = ((f64, f64), f64);

/// Kronrod estimate, error, and ∫_a^b r for the outer integrand on [a, b].
fn outer_panel<F: Fn(f64) -> f64>(
    r: &F,
    loss: &RateFn,
    a: f64,
    b: f64,
    r_a: f64,
    tol: f64,
) -> Result<Panel> {
    let nodes = panel_nodes(a, b);
    let mut values = [0.0; 15];
    for (v, &t) in values.iter_mut().zip(&nodes) {
        let k = loss.at(t);
        *v = if k == 0.0 {
            0.0
        } else {
            (r_a + integrate(r, a, t, tol)?).exp() * k
        };
    }
    let r_b = r_a + integrate(r, a, b, tol)?;
    Ok((panel_rule(a, b, &values), r_b))
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    r: &F,
    loss: &RateFn,
    (a, b): (f64, f64),
    r_a: f64,
    panel: Panel,
    target: f64,
    inner_tol: f64,
    depth: u32,
) -> Result<(f64, f64)> {
    let ((value, err), r_b) = panel;
    if !value.is_finite() {
        return Err(Error::NonFinite(format!(
            "variable-rate integrand on [{a}, {b}]"
        )));
    }
    if err <= target {
        return Ok((value, r_b));
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureNonConvergence { a, b, tol: target });
    }
    let m = 0.5 * (a + b);
    let left_panel = outer_panel(r, loss, a, m, r_a, inner_tol)?;
    let (q_left, r_m) = refine(
        r,
        loss,
        (a, m),
        r_a,
        left_panel,
        0.5 * target,
        inner_tol,
        depth + 1,
    )?;
    let right_panel = outer_panel(r, loss, m, b, r_m, inner_tol)?;
    let (q_right, r_end) = refine(
        r,
        loss,
        (m, b),
        r_m,
        right_panel,
        0.5 * target,
        inner_tol,
        depth + 1,
    )?;
    Ok((q_left + q_right, r_end))
}

/// `F(x) = f0 e^{R(x)} / (1 + f0 Q(x))` with `R = ∫_0^x r` and
/// `Q = ∫_0^x e^{R} k`, the solution of `F' = r F − k F²`, `F(0) = f0`.
pub fn variable_rate_solution(
    rate: &RateFn,
    loss: &RateFn,
    f0: f64,
    x: f64,
    quad_tol: f64,
) -> Result<f64> {
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quadrature tolerance must be positive, got {quad_tol}"
        )));
    }
    let (big_r, q) = nested_integrals(rate, loss, x, quad_tol)?;
    let den = 1.0 + f0 * q;
    if den <= 0.0 {
        return Err(Error::Domain {
            x,
            reason: format!("1 + f0 Q = {den} is not positive"),
        });
    }
    Ok(f0 * big_r.exp() / den)
}

/// Value and first derivative `r F − k F²` of the variable-rate solution.
pub fn variable_rate_terms(v: &VariableRate, x: f64) -> Result<(f64, f64)> {
    let f = variable_rate_solution(&v.rate, &v.loss, v.f0, x, v.quad_tol)?;
    Ok((f, v.rate.at(x) * f - v.loss.at(x) * f * f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logistic::LogisticModel;
    use crate::special_fn::SeriesPolicy;

    #[test]
    fn starts_at_f0() {
        let v = variable_rate_solution(
            &RateFn::constant(1.0),
            &RateFn::constant(0.01),
            1.0,
            0.0,
            1e-12,
        )
        .unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn constant_coefficients_reduce_to_classical() {
        let classical = LogisticModel::classical(1.0, 1.0, 100.0).unwrap();
        for &x in &[5.0, 10.0, -3.0] {
            let v = variable_rate_solution(
                &RateFn::constant(1.0),
                &RateFn::constant(0.01),
                1.0,
                x,
                1e-13,
            )
            .unwrap();
            let c = classical.evaluate(x, &SeriesPolicy::default()).unwrap();
            assert!((v - c).abs() < 1e-9 * c.max(1.0), "x = {x}: {v} vs {c}");
        }
    }

    #[test]
    fn pure_malthus_with_linear_rate() {
        let v = variable_rate_solution(
            &RateFn::new(|t| 1.0 + t),
            &RateFn::constant(0.0),
            1.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!((v - 1.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(variable_rate_solution(
            &RateFn::constant(1.0),
            &RateFn::constant(0.0),
            1.0,
            1.0,
            0.0
        )
        .is_err());
    }
}
