use crate::error::{Error, Result};
use crate::residual::{
    assemble_report, sampled_derivatives, DerivativeMode, ReportMeta, ResidualReport,
};

use super::{Boundary, Field1D};

/// `u = F_x / F` with 5-point stencils: centred (4th order) in the interior
/// and one-sided 4th order at the two nodes next to each end.
pub fn hopf_cole_u(f: &Field1D) -> Result<Field1D> {
    let xs = f.grid.points();
    if xs.len() < 5 {
        return Err(Error::InvalidGrid(
            "Hopf–Cole transform needs at least 5 points".into(),
        ));
    }
    for (x, v) in xs.iter().zip(&f.values) {
        if v.abs() < 1e-10 {
            return Err(Error::ZeroCrossing {
                x: *x,
                value: v.abs(),
            });
        }
    }
    let u = (0..xs.len())
        .map(|i| sampled_derivatives(xs, &f.values, i, 5, 1)[1] / f.values[i])
        .collect();
    Ok(Field1D::new(f.grid.clone(), u, f.time)?.with_boundaries(Boundary::Free, Boundary::Free))
}

fn check_stack(stack: &[Field1D], dt: f64) -> Result<()> {
    if stack.len() < 3 {
        return Err(Error::InsufficientSlices {
            needed: 3,
            got: stack.len(),
        });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let grid = &stack[0].grid;
    if grid.len() < 5 {
        return Err(Error::InvalidGrid(
            "residuals need at least 5 points per slice".into(),
        ));
    }
    if stack.iter().any(|s| &s.grid != grid) {
        return Err(Error::InvalidGrid("all slices must share one grid".into()));
    }
    Ok(())
}

/// Residual over interior slices (centred time differences) and the
/// interior points of each (two nodes dropped at either end).
fn stack_residual(
    stack: &[Field1D],
    dt: f64,
    tol: f64,
    equation: &str,
    pointwise: impl Fn(f64, f64, [f64; 3]) -> f64,
) -> Result<ResidualReport> {
    let xs = stack[0].grid.points();
    let n = xs.len();
    let mut residuals = Vec::new();
    let mut abscissa = Vec::new();
    let mut times = Vec::new();
    for k in 1..stack.len() - 1 {
        let (prev, cur, next) = (&stack[k - 1], &stack[k], &stack[k + 1]);
        for i in 2..n - 2 {
            let ut = (next.values[i] - prev.values[i]) / (2.0 * dt);
            let d = sampled_derivatives(xs, &cur.values, i, 5, 2);
            residuals.push(pointwise(xs[i], ut, [d[0], d[1], d[2]]));
            abscissa.push(xs[i]);
            times.push(cur.time);
        }
    }
    let meta = ReportMeta::new("laguerre-heat", equation, DerivativeMode::FiniteDifference);
    Ok(assemble_report(residuals, tol, meta)?
        .with_abscissa(abscissa)
        .with_times(times))
}

/// Residual of `u_t = (x u_x)_x + u_x + (1 + x ∂_x) u²` on a stack of `u`
/// slices a time `dt` apart, with `(1 + x ∂_x) u² = u² + 2x u u_x`.
pub fn laguerre_burgers_residual(u: &[Field1D], dt: f64, tol: f64) -> Result<ResidualReport> {
    check_stack(u, dt)?;
    stack_residual(u, dt, tol, "laguerre-burgers", |x, ut, [v, vx, vxx]| {
        let diffusion = vx + x * vxx;
        ut - (diffusion + vx + v * v + 2.0 * x * v * vx)
    })
}

/// Residual of `u_t = (x u_x)_x + x u_x²` for `u = ln F` on a stack of `F`
/// slices a time `dt` apart.
pub fn log_potential_residual(f: &[Field1D], dt: f64, tol: f64) -> Result<ResidualReport> {
    check_stack(f, dt)?;
    let mut logs = Vec::with_capacity(f.len());
    for slice in f {
        for (x, v) in slice.grid.iter().zip(&slice.values) {
            if !(*v > 0.0) {
                return Err(Error::NonPositiveField { x, value: *v });
            }
        }
        let values = slice.values.iter().map(|v| v.ln()).collect();
        logs.push(Field1D::new(slice.grid.clone(), values, slice.time)?);
    }
    stack_residual(&logs, dt, tol, "log-potential", |x, ut, [_, vx, vxx]| {
        ut - (vx + x * vxx + x * vx * vx)
    })
}
