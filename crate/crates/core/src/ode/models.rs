use crate::error::{Error, Result};
use crate::logistic::{linearize, LinearDescriptor, LogisticModel};
use crate::residual::{
    assemble_report, sampled_derivatives, DerivativeMode, Grid, ReportMeta, ResidualReport,
};
use crate::special_fn::SeriesPolicy;

use super::{integrate, OdeSystem};

/// Right-hand side of the first-order growth law of `model` at `(x, f)`.
pub fn logistic_rhs(model: &LogisticModel, x: f64, f: f64) -> Result<f64> {
    match model {
        LogisticModel::Classical { r, capacity, .. } => Ok(r * (1.0 - f / capacity) * f),
        LogisticModel::Normalized { r, .. } => Ok(r * (1.0 - f) * f),
        LogisticModel::TwoExponential { mu, r1, c2, r2, .. } => {
            // the c1 term is eliminated through q = 1/Z − 1
            let delta = crate::logistic::two_exp_delta(mu * c2, *r1, *r2)?;
            Ok(r1 * (1.0 - (1.0 + delta * (-r2 * x).exp()) * f) * f)
        }
        LogisticModel::Richards { r, n, .. } => Ok(r * (1.0 - f.powf(*n)) * f),
        LogisticModel::Forestry {
            alpha,
            lambda,
            chi,
            k,
            n,
            ..
        } => {
            let y = f - alpha;
            let yn = if y < 0.0 { -(-y).powf(*n) } else { y.powf(*n) };
            Ok(k / (n * lambda) * (lambda - chi * yn) * y)
        }
        LogisticModel::VariableRate(v) => Ok(v.rate.at(x) * f - v.loss.at(x) * f * f),
        other => Err(Error::Unsupported(format!(
            "the {} family has no first-order growth law",
            other.kind()
        ))),
    }
}

/// The first-order growth law of a logistic model as an [`OdeSystem`].
pub struct ModelSystem<'a> {
    model: &'a LogisticModel,
}

impl<'a> ModelSystem<'a> {
    pub fn new(model: &'a LogisticModel) -> Result<Self> {
        logistic_rhs(model, 0.0, 0.5)?;
        Ok(ModelSystem { model })
    }
}

impl OdeSystem for ModelSystem<'_> {
    type Scalar = f64;

    fn dimension(&self) -> usize {
        1
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = logistic_rhs(self.model, t, y[0])?;
        Ok(())
    }
}

/// `Y' = −a(x) Y + b(x)` from a [`LinearDescriptor`].
pub struct LinearizedSystem<'a> {
    desc: &'a LinearDescriptor,
}

impl<'a> LinearizedSystem<'a> {
    pub fn new(desc: &'a LinearDescriptor) -> Self {
        LinearizedSystem { desc }
    }
}

impl OdeSystem for LinearizedSystem<'_> {
    type Scalar = f64;

    fn dimension(&self) -> usize {
        1
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = self.desc.rhs(t, y[0]);
        Ok(())
    }
}

/// Residual of the linear counterpart `Y' = −a Y + b` along a trajectory of
/// the nonlinear growth law.
///
/// The nonlinear equation is integrated from the closed-form value at
/// `grid.start()`, mapped through `Y = F^{−power}` on the (uniform) grid,
/// and `Y'` is taken from 9-point stencils of those samples, so the check
/// does not reuse either right-hand side. When the descriptor records a
/// differently printed rate `s`, the notes carry the residual of
/// `Y' = −s (Y − b/a)` as well.
pub fn linear_counterpart_residual(
    model: &LogisticModel,
    grid: &Grid,
    ode_tol: f64,
    tol: f64,
) -> Result<ResidualReport> {
    if grid.step().is_none() || grid.len() < 9 {
        return Err(Error::InvalidGrid(
            "need a uniform grid of at least 9 points".into(),
        ));
    }
    let desc = linearize(model)?;
    let (x0, x1) = (grid.start(), grid.end());
    let f0 = model.evaluate(x0, &SeriesPolicy::default())?;
    let traj = integrate(&ModelSystem::new(model)?, &[f0], (x0, x1), ode_tol)?;
    let xs = grid.points();
    let ys = xs
        .iter()
        .map(|&x| Ok(desc.forward(traj.at(x)?[0])))
        .collect::<Result<Vec<f64>>>()?;
    let mut residuals = Vec::with_capacity(xs.len());
    let mut stated = Vec::new();
    for (i, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
        let dy = sampled_derivatives(xs, &ys, i, 9, 1)[1];
        residuals.push(dy - desc.rhs(x, y));
        if let Some(s) = desc.stated_rate {
            let equilibrium = desc.source.at(x) / desc.rate.at(x);
            stated.push((dy + s * (y - equilibrium)).abs());
        }
    }
    let mut meta = ReportMeta::new(
        model.label(),
        format!("linear({})", desc.substitution),
        DerivativeMode::FiniteDifference,
    );
    if let Some(s) = desc.stated_rate {
        let max = stated.iter().copied().fold(0.0, f64::max);
        meta = meta.with_note(format!("rate as printed r/n = {s}: max={max:e}"));
    }
    Ok(assemble_report(residuals, tol, meta)?.with_abscissa(xs.to_vec()))
}
