//! Small-signal FEL amplitude equation and its logistic field map.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::residual::{
    assemble_report, fd_weights, stencil_window, DerivativeMode, Grid, ReportMeta, ResidualReport,
};

use super::{integrate, FnSystem, Trajectory};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Detuning, gain and the initial/saturation fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FelParams {
    pub nu: f64,
    pub g0: f64,
    pub l0: Complex64,
    pub l_f: Complex64,
}

impl FelParams {
    /// `g0 = 0` is accepted so that the static-field case can be run.
    pub fn new(nu: f64, g0: f64, l0: Complex64, l_f: Complex64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "nu must be finite, got {nu}"
            )));
        }
        if !(g0 >= 0.0) || !g0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "g0 must be non-negative, got {g0}"
            )));
        }
        if !(l_f.norm() > 0.0) || !l_f.is_finite() || !l0.is_finite() {
            return Err(Error::InvalidParameter(
                "l_F must be non-zero and the fields finite".into(),
            ));
        }
        Ok(FelParams { nu, g0, l0, l_f })
    }

    /// `l̃₀ = l₀/|l_F|`.
    pub fn l_tilde0(&self) -> Complex64 {
        self.l0 / self.l_f.norm()
    }
}

/// Gain length `(π g₀)^{−1/3}`.
pub fn gain_length(p: &FelParams) -> f64 {
    (PI * p.g0).powf(-1.0 / 3.0)
}

/// `a(τ)` with `a''' = −2iν a'' + ν² a' + iπ g₀ a`, `a(0) = 1`,
/// `a'(0) = a''(0) = 0`. The state is `(a, a', a'')`.
pub fn fel_amplitude(p: &FelParams, tau_max: f64, tol: f64) -> Result<Trajectory<Complex64>> {
    if !(tau_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tau_max must be positive, got {tau_max}"
        )));
    }
    let (nu, g0) = (p.nu, p.g0);
    let sys = FnSystem::new(3, move |_t, y: &[Complex64], dy: &mut [Complex64]| {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = third_derivative(nu, g0, y);
        Ok(())
    });
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    integrate(&sys, &[one, zero, zero], (0.0, tau_max), tol)
}

fn third_derivative(nu: f64, g0: f64, y: &[Complex64]) -> Complex64 {
    -2.0 * I * nu * y[2] + nu * nu * y[1] + I * PI * g0 * y[0]
}

/// Roots of `λ³ + 2iνλ² − ν²λ − iπg₀ = 0` by Cardano's formula, each
/// polished with one Newton step.
pub fn fel_roots(p: &FelParams) -> [Complex64; 3] {
    let b = 2.0 * I * p.nu;
    let c = Complex64::new(-p.nu * p.nu, 0.0);
    let d = -I * PI * p.g0;
    // λ = s − b/3 gives s³ + P s + Q = 0
    let pp = c - b * b / 3.0;
    let qq = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (qq * qq / 4.0 + pp * pp * pp / 27.0).sqrt();
    let (u1, u2) = (-qq / 2.0 + disc, -qq / 2.0 - disc);
    let u3 = if u1.norm() >= u2.norm() { u1 } else { u2 };
    let u = u3.cbrt();
    let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    for (k, root) in roots.iter_mut().enumerate() {
        let uk = u * omega.powu(k as u32);
        let s = if uk.norm() == 0.0 {
            uk
        } else {
            uk - pp / (3.0 * uk)
        };
        let mut lam = s - b / 3.0;
        let f = ((lam + b) * lam + c) * lam + d;
        let df = (3.0 * lam + 2.0 * b) * lam + c;
        if df.norm() > 0.0 {
            lam -= f / df;
        }
        *root = lam;
    }
    roots
}

/// Largest real part among the characteristic roots: the asymptotic
/// growth rate of `ln|a|`.
pub fn fel_gain_rate(p: &FelParams) -> f64 {
    fel_roots(p)
        .iter()
        .map(|r| r.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The logistic field along sampled amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct FelField {
    pub tau: Vec<f64>,
    pub a: Vec<Complex64>,
    /// `l = l₀ a / (1 + (l₀/|l_F|)(a − 1))`.
    pub l: Vec<Complex64>,
    /// `l̃ = l/|l_F|`.
    pub l_tilde: Vec<Complex64>,
    /// `A l̃/(1 − l̃)` with `A = 1/l̃₀ − 1`, which recovers `a`.
    pub a_recovered: Vec<Complex64>,
    /// Largest `|a_recovered − a| / max(1, |a|)`.
    pub inversion_error: f64,
}

/// Maps `(τ, (a, ...))` rows to the logistic field.
pub fn fel_logistic_field(rows: &[(f64, Vec<Complex64>)], p: &FelParams) -> Result<FelField> {
    let c = p.l_tilde0();
    let big_a = 1.0 / c - 1.0;
    let n = rows.len();
    let mut field = FelField {
        tau: Vec::with_capacity(n),
        a: Vec::with_capacity(n),
        l: Vec::with_capacity(n),
        l_tilde: Vec::with_capacity(n),
        a_recovered: Vec::with_capacity(n),
        inversion_error: 0.0,
    };
    for (tau, state) in rows {
        let a = state[0];
        let den = 1.0 + c * (a - 1.0);
        if den.norm() < 1e-12 {
            return Err(Error::PoleCrossing {
                tau: *tau,
                magnitude: den.norm(),
            });
        }
        let l = p.l0 * a / den;
        let lt = l / p.l_f.norm();
        let back = big_a * lt / (1.0 - lt);
        field.inversion_error = field
            .inversion_error
            .max((back - a).norm() / a.norm().max(1.0));
        field.tau.push(*tau);
        field.a.push(a);
        field.l.push(l);
        field.l_tilde.push(lt);
        field.a_recovered.push(back);
    }
    Ok(field)
}

/// `l̃''' + l̃''(6f + 2iν) + (1 − l̃)(6f³ + 4iνf² − ν²f − iπg₀l̃)` with
/// `f = l̃'/(1 − l̃)`.
fn field_equation(p: &FelParams, l: [Complex64; 4]) -> Complex64 {
    let nu = p.nu;
    let w = 1.0 - l[0];
    let f = l[1] / w;
    l[3] + l[2] * (6.0 * f + 2.0 * I * nu)
        + w * (6.0 * f * f * f + 4.0 * I * nu * f * f - nu * nu * f - I * PI * p.g0 * l[0])
}

fn band_check(tau: f64, lt: Complex64, delta: f64) -> Result<()> {
    let gap = (1.0 - lt).norm();
    if gap < delta {
        return Err(Error::SingularGrid {
            x: tau,
            value: gap,
            lower: delta,
            upper: f64::INFINITY,
        });
    }
    Ok(())
}

/// Derivatives 0..=3 of the sampled curve at every node (7-point stencils).
fn sampled_jets(grid: &[f64], values: &[Complex64]) -> Vec<[Complex64; 4]> {
    (0..grid.len())
        .map(|i| {
            let win = stencil_window(i, grid.len(), 7);
            let w = fd_weights(grid[i], &grid[win.clone()], 3);
            let mut out = [Complex64::new(0.0, 0.0); 4];
            for (k, row) in w.iter().enumerate() {
                out[k] = row
                    .iter()
                    .zip(&values[win.clone()])
                    .map(|(c, v)| v * c)
                    .sum();
            }
            out
        })
        .collect()
}

fn fd_residuals(
    sample: &dyn Fn(f64) -> Result<Complex64>,
    p: &FelParams,
    grid: &Grid,
    delta: f64,
) -> Result<(Vec<Complex64>, bool)> {
    let values: Vec<Complex64> = grid.iter().map(sample).collect::<Result<_>>()?;
    let jets = sampled_jets(grid.points(), &values);
    let mut constant = true;
    let mut out = Vec::with_capacity(jets.len());
    for (tau, jet) in grid.iter().zip(&jets) {
        band_check(tau, jet[0], delta)?;
        if jet[1].norm() > 1e-12 * jet[0].norm().max(1.0) {
            constant = false;
        }
        out.push(field_equation(p, *jet));
    }
    Ok((out, constant))
}

/// Finite-difference residual of the nonlinear field equation for a
/// sampled `l̃(τ)`, evaluated on `grid` (step `h`) and on its refinement
/// (step `h/2`). Always a diagnostic: the residuals reported are those at
/// step `h`, with both maxima and their ratio in the notes.
pub fn fel_nonlinear_residual(
    l_tilde: &dyn Fn(f64) -> Result<Complex64>,
    p: &FelParams,
    grid: &Grid,
    delta: f64,
) -> Result<ResidualReport> {
    if grid.step().is_none() {
        return Err(Error::InvalidGrid(
            "the field-equation residual needs a uniform grid".into(),
        ));
    }
    let fine = Grid::uniform(grid.start(), grid.end(), 2 * grid.len() - 1)?;
    let (coarse_res, constant) = fd_residuals(l_tilde, p, grid, delta)?;
    let (fine_res, _) = fd_residuals(l_tilde, p, &fine, delta)?;
    let max_h = coarse_res.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let max_h2 = fine_res
        .iter()
        .step_by(2)
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    let ratio = if max_h2 > 0.0 {
        max_h / max_h2
    } else {
        f64::INFINITY
    };

    let mut meta = ReportMeta::new("fel", "fel-5.13", DerivativeMode::FiniteDifference)
        .with_note(format!("h={:e} max={:e}", grid.step().unwrap(), max_h))
        .with_note(format!("h/2={:e} max={:e}", fine.step().unwrap(), max_h2))
        .with_note(format!("refinement ratio={ratio:.3}"));
    if constant {
        meta = meta
            .with_note("constant trajectory: derivative terms vanish, the equation does not apply");
    }
    let (re, im): (Vec<f64>, Vec<f64>) = coarse_res.iter().map(|r| (r.re, r.im)).unzip();
    let mags = coarse_res.iter().map(|r| r.norm()).collect();
    Ok(assemble_report(mags, 1e-6, meta)?
        .with_abscissa(grid.points().to_vec())
        .with_components(re, im)
        .into_diagnostic())
}

/// `l̃` along the dense output of an amplitude trajectory.
fn l_tilde_at(traj: &Trajectory<Complex64>, p: &FelParams, tau: f64) -> Result<Complex64> {
    let a = traj.at(tau)?[0];
    let c = p.l_tilde0();
    let den = 1.0 + c * (a - 1.0);
    if den.norm() < 1e-12 {
        return Err(Error::PoleCrossing {
            tau,
            magnitude: den.norm(),
        });
    }
    Ok(c * a / den)
}

/// [`fel_nonlinear_residual`] on the dense output of `traj`, with the
/// exact-jet residual from [`fel_jet_residual`] added to the notes.
pub fn fel_trajectory_residual(
    traj: &Trajectory<Complex64>,
    p: &FelParams,
    grid: &Grid,
) -> Result<ResidualReport> {
    let sample = |tau: f64| l_tilde_at(traj, p, tau);
    let mut report = fel_nonlinear_residual(&sample, p, grid, 1e-9)?;
    let jet = fel_jet_residual(traj, p, grid)?;
    report.meta = report
        .meta
        .with_note(format!("exact-jet residual max={:e}", jet.max_norm));
    Ok(report)
}

/// Residual of the field equation with `l̃` derivatives obtained by the
/// chain rule from `(a, a', a'')` and `a'''` from the amplitude equation.
pub fn fel_jet_residual(
    traj: &Trajectory<Complex64>,
    p: &FelParams,
    grid: &Grid,
) -> Result<ResidualReport> {
    let c = p.l_tilde0();
    let k = 1.0 - c;
    let mut res = Vec::with_capacity(grid.len());
    for tau in grid.iter() {
        let y = traj.at(tau)?;
        let a3 = third_derivative(p.nu, p.g0, &y);
        // 1 − l̃ = K/D with D = 1 − c + c a
        let d0 = 1.0 - c + c * y[0];
        if d0.norm() < 1e-12 {
            return Err(Error::PoleCrossing {
                tau,
                magnitude: d0.norm(),
            });
        }
        let (d1, d2, d3) = (c * y[1], c * y[2], c * a3);
        let inv = 1.0 / d0;
        let w0 = k * inv;
        let w1 = -k * d1 * inv * inv;
        let w2 = k * (2.0 * d1 * d1 * inv * inv * inv - d2 * inv * inv);
        let w3 = k
            * (-d3 * inv * inv + 6.0 * d1 * d2 * inv * inv * inv
                - 6.0 * d1 * d1 * d1 * inv.powu(4));
        let l = [1.0 - w0, -w1, -w2, -w3];
        band_check(tau, l[0], 1e-9)?;
        res.push(field_equation(p, l));
    }
    let (re, im): (Vec<f64>, Vec<f64>) = res.iter().map(|r| (r.re, r.im)).unzip();
    let meta = ReportMeta::new("fel", "fel-5.13", DerivativeMode::Analytic);
    Ok(
        assemble_report(res.iter().map(|r| r.norm()).collect(), 1e-6, meta)?
            .with_abscissa(grid.points().to_vec())
            .with_components(re, im)
            .into_diagnostic(),
    )
}
