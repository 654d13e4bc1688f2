//! Tricomi functions, the real Gamma function and the Laguerre derivative.
//!
//! The ν-th order Tricomi function is the entire series
//!
//! ```text
//! e_ν(x) = Σ_{r≥0} x^r / (r! Γ(ν + r + 1)),   ν > −1
//! ```
//!
//! with `e_0(x) = I_0(2√x)` for `x ≥ 0`. Term-wise differentiation gives
//! `e_ν' = e_{ν+1}`, which is what the analytic derivative routines use.
//! The Laguerre derivative `L_ν = d/dx x d/dx + ν d/dx` has `e_ν(λx)` as an
//! eigenfunction with eigenvalue `λ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::residual::{
    assemble_report, numeric_derivative, step_floor, DerivativeMode, Grid, ReportMeta,
    ResidualReport,
};

/// Truncation controls for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            rel_tol: 1e-14,
            max_terms: 200,
        }
    }
}

impl SeriesPolicy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must be positive, got {rel_tol}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::InvalidParameter(
                "max_terms must be at least 1".into(),
            ));
        }
        Ok(SeriesPolicy { rel_tol, max_terms })
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// sin(πx) without the argument-reduction loss of `(PI * x).sin()`.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    if r.abs() <= 0.25 {
        (PI * r).sin()
    } else if r > 0.75 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.75 {
        -(PI * (1.0 + r)).sin()
    } else if r > 0.0 {
        (PI * (0.5 - r)).cos()
    } else {
        -(PI * (0.5 + r)).cos()
    }
}

/// Γ(x) for real x by the Lanczos approximation, with reflection below 1/2.
pub fn gamma_real(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NonFinite("gamma argument is NaN".into()));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::GammaPole(x));
    }
    if x > 171.624_376_956_302_7 {
        return Err(Error::GammaOverflow(x));
    }
    if x == x.floor() && x <= 171.0 {
        return Ok((2..x as u32).fold(1.0, |acc, k| acc * k as f64));
    }
    if x < 0.5 {
        let g = gamma_real(1.0 - x)?;
        return Ok(PI / (sin_pi(x) * g));
    }
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power so Γ(171) does not overflow in t^(z+1/2)
    let half = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * half * (half * (-t).exp()) * series)
}

/// e_ν(λx) with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TricomiFunction {
    pub nu: f64,
    pub scale: f64,
}

impl TricomiFunction {
    pub fn new(nu: f64, scale: f64) -> Result<Self> {
        if !(nu > -1.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Tricomi order must exceed -1, got {nu}"
            )));
        }
        if !scale.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite scale {scale}")));
        }
        Ok(TricomiFunction { nu, scale })
    }

    pub fn eval(&self, x: f64, policy: &SeriesPolicy) -> Result<f64> {
        tricomi_series(self.nu, self.scale * x, policy)
    }

    /// d/dx e_ν(λx) = λ e_{ν+1}(λx).
    pub fn derivative(&self, x: f64, policy: &SeriesPolicy) -> Result<f64> {
        Ok(self.scale * tricomi_series(self.nu + 1.0, self.scale * x, policy)?)
    }

    /// d²/dx² e_ν(λx) = λ² e_{ν+2}(λx).
    pub fn second_derivative(&self, x: f64, policy: &SeriesPolicy) -> Result<f64> {
        Ok(self.scale * self.scale * tricomi_series(self.nu + 2.0, self.scale * x, policy)?)
    }
}

/// Raw series e_ν(y).
///
/// Terms follow `t_{r+1} = t_r · y / ((r+1)(ν+r+1))`. Summation stops once the
/// next term is below `rel_tol · |sum|` and the terms are decreasing; hitting
/// `max_terms` first is an error. Negative `y` uses the same (alternating)
/// series, with reduced accuracy below about −30.
pub fn tricomi_series(nu: f64, y: f64, policy: &SeriesPolicy) -> Result<f64> {
    if !(nu > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Tricomi order must exceed -1, got {nu}"
        )));
    }
    if !y.is_finite() {
        return Err(Error::NonFinite(format!("Tricomi argument {y}")));
    }
    let mut term = 1.0 / gamma_real(nu + 1.0)?;
    let mut sum = term;
    for r in 0..policy.max_terms {
        let ratio = y / ((r as f64 + 1.0) * (nu + r as f64 + 1.0));
        term *= ratio;
        if term.abs() <= policy.rel_tol * sum.abs() && ratio.abs() < 1.0 {
            return Ok(sum);
        }
        sum += term;
        if !sum.is_finite() {
            return Err(Error::NonFinite(format!(
                "Tricomi series overflow at y = {y}"
            )));
        }
    }
    Err(Error::SeriesNonConvergence {
        x: y,
        max_terms: policy.max_terms,
    })
}

pub fn tricomi_eval(f: &TricomiFunction, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    f.eval(x, policy)
}

pub fn tricomi_derivative(f: &TricomiFunction, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    f.derivative(x, policy)
}

/// Default step for [`laguerre_op_apply`].
pub fn default_laguerre_step(x: f64) -> f64 {
    crate::residual::default_step(x, 2)
}

/// `f'(x) + x f''(x) + ν f'(x)` by Richardson-extrapolated central differences.
///
/// At `x = 0` the second-derivative term is skipped, the operator being
/// regular there.
pub fn laguerre_op_apply<F: Fn(f64) -> f64>(f: &F, x: f64, nu: f64, h: f64) -> Result<f64> {
    let floor = step_floor(x, 2);
    if !(h >= floor) {
        return Err(Error::StepUnderflow { step: h, floor });
    }
    let d1 = numeric_derivative(f, x, 1, h)?.value;
    let d2 = if x == 0.0 {
        0.0
    } else {
        numeric_derivative(f, x, 2, h)?.value
    };
    Ok((1.0 + nu) * d1 + x * d2)
}

/// Residual of `L_ν e_ν(λx) = λ e_ν(λx)` from the analytic series derivatives.
pub fn eigen_residual(
    nu: f64,
    lambda: f64,
    grid: &Grid,
    policy: &SeriesPolicy,
    tol: f64,
) -> Result<ResidualReport> {
    let f = TricomiFunction::new(nu, lambda)?;
    let mut residuals = Vec::with_capacity(grid.len());
    for x in grid.iter() {
        let lhs = (1.0 + nu) * f.derivative(x, policy)? + x * f.second_derivative(x, policy)?;
        residuals.push(lhs - lambda * f.eval(x, policy)?);
    }
    let meta = ReportMeta::new(
        format!("tricomi(nu={nu},lambda={lambda})"),
        "laguerre-eigen",
        DerivativeMode::Analytic,
    );
    Ok(assemble_report(residuals, tol, meta)?.with_abscissa(grid.points().to_vec()))
}

/// Same check with the operator applied by finite differences. The grid
/// must lie in (0, ∞).
pub fn eigen_residual_fd(
    nu: f64,
    lambda: f64,
    grid: &Grid,
    policy: &SeriesPolicy,
    tol: f64,
) -> Result<ResidualReport> {
    if grid.start() <= 0.0 {
        return Err(Error::InvalidGrid(
            "finite-difference eigen check needs x > 0".into(),
        ));
    }
    let f = TricomiFunction::new(nu, lambda)?;
    let eval = |x: f64| f.eval(x, policy).unwrap_or(f64::NAN);
    let mut residuals = Vec::with_capacity(grid.len());
    for x in grid.iter() {
        let lhs = laguerre_op_apply(&eval, x, nu, default_laguerre_step(x))?;
        residuals.push(lhs - lambda * f.eval(x, policy)?);
    }
    let meta = ReportMeta::new(
        format!("tricomi(nu={nu},lambda={lambda})"),
        "laguerre-eigen",
        DerivativeMode::FiniteDifference,
    );
    Ok(assemble_report(residuals, tol, meta)?.with_abscissa(grid.points().to_vec()))
}

/// Residual of `d/dt(t dN/dt) = λα² t^{α−1} N` for `N(t) = e_0(λ t^α)`.
///
/// `N'` and `N''` come from the chain rule on the analytic series
/// derivatives; the left side is assembled as `N' + t N''`.
pub fn korf_residual(
    lambda: f64,
    alpha: f64,
    grid: &Grid,
    policy: &SeriesPolicy,
    tol: f64,
) -> Result<ResidualReport> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if grid.start() <= 0.0 {
        return Err(Error::InvalidGrid("Korf check needs t > 0".into()));
    }
    let mut residuals = Vec::with_capacity(grid.len());
    for t in grid.iter() {
        let y = lambda * t.powf(alpha);
        let e0 = tricomi_series(0.0, y, policy)?;
        let e1 = tricomi_series(1.0, y, policy)?;
        let e2 = tricomi_series(2.0, y, policy)?;
        // y' and y'' of the stretched argument
        let dy = lambda * alpha * t.powf(alpha - 1.0);
        let d2y = lambda * alpha * (alpha - 1.0) * t.powf(alpha - 2.0);
        let n1 = dy * e1;
        let n2 = d2y * e1 + dy * dy * e2;
        let lhs = n1 + t * n2;
        let rhs = lambda * alpha * alpha * t.powf(alpha - 1.0) * e0;
        residuals.push(lhs - rhs);
    }
    let meta = ReportMeta::new(
        format!("korf(lambda={lambda},alpha={alpha})"),
        "korf",
        DerivativeMode::Analytic,
    );
    Ok(assemble_report(residuals, tol, meta)?.with_abscissa(grid.points().to_vec()))
}
