//! Grids, finite-difference stencils and residual reports.
//!
//! # Report CSV schema
//!
//! [`ResidualReport::to_csv`] writes one comment line of metadata followed by
//! a header and one row per residual point:
//!
//! ```text
//! # equation=<id> model=<id> mode=<analytic|finite-difference> tol=<v> verdict=<PASS|FAIL|DIAG>
//! x,residual                    (plain reports)
//! t,x,residual                  (reports over space-time points)
//! x,re,im,residual              (complex residuals; residual = modulus)
//! ```
//!
//! Numbers are written with 17 significant digits so that files round-trip.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Formats a value with 17 significant digits (round-trip safe).
pub fn format_value(v: f64) -> String {
    format!("{:.16e}", v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    Uniform(f64),
    Explicit,
}

/// Ordered sample abscissas with at least three points.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    spacing: Spacing,
}

impl Grid {
    pub fn uniform(start: f64, end: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidGrid("non-finite bounds".into()));
        }
        if count < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {count}"
            )));
        }
        if end <= start {
            return Err(Error::InvalidGrid(format!(
                "end {end} must exceed start {start}"
            )));
        }
        let step = (end - start) / (count - 1) as f64;
        let points = (0..count)
            .map(|i| {
                if i == count - 1 {
                    end
                } else {
                    start + step * i as f64
                }
            })
            .collect();
        Ok(Grid {
            points,
            spacing: Spacing::Uniform(step),
        })
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid("non-finite abscissa".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(
                "abscissas must be strictly increasing".into(),
            ));
        }
        Ok(Grid {
            points,
            spacing: Spacing::Explicit,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Uniform step, if the grid was built with one.
    pub fn step(&self) -> Option<f64> {
        match self.spacing {
            Spacing::Uniform(h) => Some(h),
            Spacing::Explicit => None,
        }
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().copied()
    }
}

/// Parses `start:end:count`.
impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!(
                "expected start:end:count, got '{s}'"
            )));
        }
        let num = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("bad number '{p}' in '{s}'")))
        };
        let count = parts[2]
            .parse::<usize>()
            .map_err(|_| Error::InvalidGrid(format!("bad count '{}' in '{s}'", parts[2])))?;
        Grid::uniform(num(parts[0])?, num(parts[1])?, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

impl fmt::Display for DerivativeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DerivativeMode::Analytic => "analytic",
            DerivativeMode::FiniteDifference => "finite-difference",
        })
    }
}

impl FromStr for DerivativeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(DerivativeMode::Analytic),
            "fd" | "finite-difference" => Ok(DerivativeMode::FiniteDifference),
            other => Err(Error::InvalidParameter(format!(
                "unknown derivative mode '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Recorded for information only; never a build failure.
    Diagnostic,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Diagnostic => "DIAG",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportMeta {
    pub model: String,
    pub equation: String,
    pub mode: DerivativeMode,
    pub notes: Vec<String>,
}

impl ReportMeta {
    pub fn new(
        model: impl Into<String>,
        equation: impl Into<String>,
        mode: DerivativeMode,
    ) -> Self {
        ReportMeta {
            model: model.into(),
            equation: equation.into(),
            mode,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Pointwise |LHS − RHS| of an equation with summary norms and a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub residuals: Vec<f64>,
    pub abscissa: Vec<f64>,
    pub times: Vec<f64>,
    /// Real and imaginary parts for complex-valued equations.
    pub components: Option<(Vec<f64>, Vec<f64>)>,
    pub max_norm: f64,
    /// Root mean square over the points.
    pub l2_norm: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub meta: ReportMeta,
}

/// Builds a report from residual magnitudes; pass iff `max ≤ tol`.
pub fn assemble_report(residuals: Vec<f64>, tol: f64, meta: ReportMeta) -> Result<ResidualReport> {
    if residuals.is_empty() {
        return Err(Error::EmptyResiduals);
    }
    if let Some(bad) = residuals.iter().find(|r| r.is_nan()) {
        return Err(Error::NonFinite(format!("residual {bad}")));
    }
    let residuals: Vec<f64> = residuals.into_iter().map(f64::abs).collect();
    let max_norm = residuals.iter().copied().fold(0.0, f64::max);
    let mean_sq = residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64;
    // RMS can exceed max by an ulp through rounding
    let l2_norm = mean_sq.sqrt().min(max_norm);
    let verdict = if max_norm <= tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ResidualReport {
        residuals,
        abscissa: Vec::new(),
        times: Vec::new(),
        components: None,
        max_norm,
        l2_norm,
        tolerance: tol,
        verdict,
        meta,
    })
}

impl ResidualReport {
    pub fn with_abscissa(mut self, abscissa: Vec<f64>) -> Self {
        debug_assert_eq!(abscissa.len(), self.residuals.len());
        self.abscissa = abscissa;
        self
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        debug_assert_eq!(times.len(), self.residuals.len());
        self.times = times;
        self
    }

    pub fn with_components(mut self, re: Vec<f64>, im: Vec<f64>) -> Self {
        self.components = Some((re, im));
        self
    }

    pub fn into_diagnostic(mut self) -> Self {
        self.verdict = Verdict::Diagnostic;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Maxima of |Re| and |Im| for complex reports.
    pub fn component_maxima(&self) -> Option<(f64, f64)> {
        self.components.as_ref().map(|(re, im)| {
            (
                re.iter().map(|v| v.abs()).fold(0.0, f64::max),
                im.iter().map(|v| v.abs()).fold(0.0, f64::max),
            )
        })
    }

    /// `PASS max=<v> l2=<v> tol=<v>`, with `re_max`/`im_max` for complex reports.
    pub fn verdict_line(&self) -> String {
        let mut line = format!(
            "{} max={} l2={} tol={}",
            self.verdict,
            format_value(self.max_norm),
            format_value(self.l2_norm),
            format_value(self.tolerance)
        );
        if let Some((re, im)) = self.component_maxima() {
            line.push_str(&format!(
                " re_max={} im_max={}",
                format_value(re),
                format_value(im)
            ));
        }
        line
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# equation={} model={} mode={} tol={} verdict={}\n",
            self.meta.equation,
            self.meta.model,
            self.meta.mode,
            format_value(self.tolerance),
            self.verdict
        );
        for note in &self.meta.notes {
            out.push_str(&format!("# {note}\n"));
        }
        let has_x = !self.abscissa.is_empty();
        let has_t = !self.times.is_empty();
        let mut header = Vec::new();
        if has_t {
            header.push("t");
        }
        if has_x {
            header.push("x");
        }
        if self.components.is_some() {
            header.extend(["re", "im"]);
        }
        header.push("residual");
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.residuals.len() {
            let mut row = Vec::new();
            if has_t {
                row.push(format_value(self.times[i]));
            }
            if has_x {
                row.push(format_value(self.abscissa[i]));
            }
            if let Some((re, im)) = &self.components {
                row.push(format_value(re[i]));
                row.push(format_value(im[i]));
            }
            row.push(format_value(self.residuals[i]));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// A finite-difference value with the Richardson error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

/// Default step for the derivative of the given order at `x`.
pub fn default_step(x: f64, order: u32) -> f64 {
    let scale = x.abs().max(1.0);
    match order {
        1 => 1e-3 * scale,
        2 => 5e-3 * scale,
        _ => 1e-2 * scale,
    }
}

/// Smallest step accepted for the given order at `x`.
pub fn step_floor(x: f64, order: u32) -> f64 {
    let scale = x.abs().max(1.0);
    match order {
        1 => 1e-8 * scale,
        2 => 1e-6 * scale,
        _ => 1e-5 * scale,
    }
}

/// Raw central stencil without extrapolation: 4th order for derivative
/// orders 1 and 2, 2nd order for order 3.
pub fn central_stencil<F: Fn(f64) -> f64>(f: &F, x: f64, order: u32, h: f64) -> Result<f64> {
    let v = match order {
        1 => (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h),
        2 => {
            (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
                / (12.0 * h * h)
        }
        3 => {
            (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "derivative order {order} not in 1..=3"
            )))
        }
    };
    Ok(v)
}

/// Central-difference derivative with one level of Richardson extrapolation.
pub fn numeric_derivative<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    order: u32,
    h: f64,
) -> Result<Derivative> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "derivative order {order} not in 1..=3"
        )));
    }
    let floor = step_floor(x, order);
    if !(h >= floor) {
        return Err(Error::StepUnderflow { step: h, floor });
    }
    let coarse = central_stencil(f, x, order, h)?;
    let fine = central_stencil(f, x, order, 0.5 * h)?;
    let formal_order = if order == 3 { 2 } else { 4 };
    let factor = (1u32 << formal_order) as f64;
    let value = (factor * fine - coarse) / (factor - 1.0);
    if !value.is_finite() {
        return Err(Error::NonFinite(format!(
            "derivative of order {order} at x = {x}"
        )));
    }
    Ok(Derivative {
        value,
        error: (value - fine).abs(),
    })
}

/// Fornberg finite-difference weights.
///
/// Returns `w[k][j]`, the weight of `nodes[j]` in the approximation of the
/// k-th derivative at `z`, for `k = 0..=max_order`.
pub fn fd_weights(z: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Index window of `width` consecutive nodes, centred on `i` where possible.
pub fn stencil_window(i: usize, len: usize, width: usize) -> std::ops::Range<usize> {
    let half = width / 2;
    let start = i.saturating_sub(half).min(len.saturating_sub(width));
    start..(start + width).min(len)
}

/// Derivatives of orders `0..=max_order` of sampled data at node `i`, from a
/// `width`-point stencil centred where possible and biased at the ends.
pub fn sampled_derivatives(
    xs: &[f64],
    ys: &[f64],
    i: usize,
    width: usize,
    max_order: usize,
) -> Vec<f64> {
    let window = stencil_window(i, xs.len(), width);
    let w = fd_weights(xs[i], &xs[window.clone()], max_order);
    w.iter()
        .map(|row| {
            row.iter()
                .zip(&ys[window.clone()])
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}
