//! Adaptive Dormand–Prince 5(4) integration for real and complex states.

mod fel;
mod models;

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::residual::format_value;

pub use fel::{
    fel_amplitude, fel_gain_rate, fel_jet_residual, fel_logistic_field, fel_nonlinear_residual,
    fel_roots, fel_trajectory_residual, gain_length, FelField, FelParams,
};
pub use models::{linear_counterpart_residual, logistic_rhs, LinearizedSystem, ModelSystem};

/// Scalar field of an ODE state: `f64` or `Complex64`.
pub trait OdeScalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Real components per scalar (1 or 2).
    const PARTS: usize;

    fn zero() -> Self;

    fn part(&self, i: usize) -> f64;

    fn is_finite(&self) -> bool {
        (0..Self::PARTS).all(|i| self.part(i).is_finite())
    }
}

impl OdeScalar for f64 {
    const PARTS: usize = 1;

    fn zero() -> Self {
        0.0
    }

    fn part(&self, _i: usize) -> f64 {
        *self
    }
}

impl OdeScalar for Complex64 {
    const PARTS: usize = 2;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn part(&self, i: usize) -> f64 {
        if i == 0 {
            self.re
        } else {
            self.im
        }
    }
}

/// `y' = f(t, y)` on a fixed-dimension state.
pub trait OdeSystem {
    type Scalar: OdeScalar;

    fn dimension(&self) -> usize;

    fn rhs(&self, t: f64, y: &[Self::Scalar], dy: &mut [Self::Scalar]) -> Result<()>;

    fn is_complex(&self) -> bool {
        Self::Scalar::PARTS == 2
    }
}

/// An [`OdeSystem`] backed by a closure.
pub struct FnSystem<S, F> {
    dim: usize,
    f: F,
    _scalar: std::marker::PhantomData<S>,
}

impl<S, F> FnSystem<S, F>
where
    S: OdeScalar,
    F: Fn(f64, &[S], &mut [S]) -> Result<()>,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnSystem {
            dim,
            f,
            _scalar: std::marker::PhantomData,
        }
    }
}

impl<S, F> OdeSystem for FnSystem<S, F>
where
    S: OdeScalar,
    F: Fn(f64, &[S], &mut [S]) -> Result<()>,
{
    type Scalar = S;

    fn dimension(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, y: &[S], dy: &mut [S]) -> Result<()> {
        (self.f)(t, y, dy)
    }
}

/// A complex system rewritten as a real one of twice the dimension,
/// `(re y0, im y0, re y1, ...)`.
pub struct DoubledReal<'a, S> {
    inner: &'a S,
}

impl<'a, S: OdeSystem<Scalar = Complex64>> DoubledReal<'a, S> {
    pub fn new(inner: &'a S) -> Self {
        DoubledReal { inner }
    }
}

/// `(re y0, im y0, re y1, ...)`.
pub fn pack_complex(y: &[Complex64]) -> Vec<f64> {
    y.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn unpack_complex(y: &[f64]) -> Vec<Complex64> {
    y.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

impl<S: OdeSystem<Scalar = Complex64>> OdeSystem for DoubledReal<'_, S> {
    type Scalar = f64;

    fn dimension(&self) -> usize {
        2 * self.inner.dimension()
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let z = unpack_complex(y);
        let mut dz = vec![Complex64::zero(); z.len()];
        self.inner.rhs(t, &z, &mut dz)?;
        dy.copy_from_slice(&pack_complex(&dz));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorOptions {
    /// Mixed absolute/relative tolerance: each real component `i` is held to
    /// `tol (1 + |y_i|)` per step.
    pub tol: f64,
    /// First trial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Take uniform steps of this size with no error control.
    pub fixed_step: Option<f64>,
}

impl IntegratorOptions {
    pub fn new(tol: f64) -> Self {
        IntegratorOptions {
            tol,
            initial_step: None,
            max_steps: 1_000_000,
            fixed_step: None,
        }
    }

    pub fn fixed(h: f64) -> Self {
        IntegratorOptions {
            fixed_step: Some(h),
            ..Self::new(1.0)
        }
    }
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone)]
struct Segment<S> {
    t: f64,
    h: f64,
    coeffs: [Vec<S>; 5],
}

impl<S: OdeScalar> Segment<S> {
    fn eval(&self, t: f64) -> Vec<S> {
        let theta = (t - self.t) / self.h;
        let theta1 = 1.0 - theta;
        let [c0, c1, c2, c3, c4] = &self.coeffs;
        (0..c0.len())
            .map(|i| c0[i] + (c1[i] + (c2[i] + (c3[i] + c4[i] * theta1) * theta) * theta1) * theta)
            .collect()
    }
}

/// Accepted steps of an integration, with dense output between them.
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub nodes: Vec<(f64, Vec<S>)>,
    pub accepted: usize,
    pub rejected: usize,
    /// Tolerance the run was held to (`None` for fixed-step runs).
    pub tolerance: Option<f64>,
    segments: Vec<Segment<S>>,
}

impl<S: OdeScalar> Trajectory<S> {
    pub fn start(&self) -> f64 {
        self.nodes[0].0
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].0
    }

    pub fn final_state(&self) -> &[S] {
        &self.nodes[self.nodes.len() - 1].1
    }

    pub fn dimension(&self) -> usize {
        self.nodes[0].1.len()
    }

    /// State at any `t` in the span, from the order-4 continuous extension
    /// of the Dormand–Prince pair.
    pub fn at(&self, t: f64) -> Result<Vec<S>> {
        if !(t >= self.start() && t <= self.end()) {
            return Err(Error::Domain {
                x: t,
                reason: format!(
                    "outside the integrated span [{}, {}]",
                    self.start(),
                    self.end()
                ),
            });
        }
        if t == self.end() {
            return Ok(self.final_state().to_vec());
        }
        let idx = self.segments.partition_point(|s| s.t + s.h <= t);
        Ok(self.segments[idx.min(self.segments.len() - 1)].eval(t))
    }

    /// Dense output on the given abscissas.
    pub fn sample(&self, ts: &[f64]) -> Result<Vec<(f64, Vec<S>)>> {
        ts.iter().map(|&t| Ok((t, self.at(t)?))).collect()
    }

    /// CSV with header `t,re(y0),im(y0),...` (complex) or `t,y0,...` (real).
    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.nodes)
    }
}

/// CSV for `(t, state)` rows, in the trajectory layout.
pub fn rows_to_csv<S: OdeScalar>(rows: &[(f64, Vec<S>)]) -> String {
    let dim = rows.first().map_or(0, |r| r.1.len());
    let mut out = String::from("t");
    for i in 0..dim {
        if S::PARTS == 2 {
            out.push_str(&format!(",re(y{i}),im(y{i})"));
        } else {
            out.push_str(&format!(",y{i}"));
        }
    }
    out.push('\n');
    for (t, y) in rows {
        out.push_str(&format_value(*t));
        for v in y {
            for p in 0..S::PARTS {
                out.push(',');
                out.push_str(&format_value(v.part(p)));
            }
        }
        out.push('\n');
    }
    out
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// dense-output weights
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

fn combine<S: OdeScalar>(base: &[S], h: f64, k: &[Vec<S>], w: &[f64]) -> Vec<S> {
    let mut out = base.to_vec();
    for (kj, &wj) in k.iter().zip(w) {
        if wj != 0.0 {
            for (o, v) in out.iter_mut().zip(kj) {
                *o = *o + *v * (h * wj);
            }
        }
    }
    out
}

fn check_finite<S: OdeScalar>(t: f64, y: &[S]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("state at t = {t}")))
    }
}

/// Integrates `system` over `span` from `y0` with tolerance `tol`.
pub fn integrate<Sys: OdeSystem>(
    system: &Sys,
    y0: &[Sys::Scalar],
    span: (f64, f64),
    tol: f64,
) -> Result<Trajectory<Sys::Scalar>> {
    integrate_with(system, y0, span, &IntegratorOptions::new(tol))
}

pub fn integrate_with<Sys: OdeSystem>(
    system: &Sys,
    y0: &[Sys::Scalar],
    span: (f64, f64),
    opts: &IntegratorOptions,
) -> Result<Trajectory<Sys::Scalar>> {
    let (t0, t1) = span;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "span must satisfy t0 < t1, got [{t0}, {t1}]"
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if y0.len() != system.dimension() {
        return Err(Error::InvalidParameter(format!(
            "initial state has {} components, system has {}",
            y0.len(),
            system.dimension()
        )));
    }
    check_finite(t0, y0)?;
    let dim = y0.len();
    let mut k: Vec<Vec<Sys::Scalar>> = vec![vec![Sys::Scalar::zero(); dim]; 7];
    system.rhs(t0, y0, &mut k[0])?;
    check_finite(t0, &k[0])?;

    let mut traj = Trajectory {
        nodes: vec![(t0, y0.to_vec())],
        accepted: 0,
        rejected: 0,
        tolerance: if opts.fixed_step.is_some() {
            None
        } else {
            Some(opts.tol)
        },
        segments: Vec::new(),
    };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = match (opts.fixed_step, opts.initial_step) {
        (Some(h), _) | (None, Some(h)) => h,
        (None, None) => initial_step(&y, &k[0], t1 - t0, opts.tol),
    };
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {h}"
        )));
    }
    let mut steps = 0usize;

    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        steps += 1;
        let last = t + h >= t1 || (t1 - (t + h)) <= 1e-12 * t1.abs().max(1.0);
        let h_step = if last { t1 - t } else { h };
        if h_step <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h: h_step });
        }

        for s in 1..7 {
            let (head, tail) = k.split_at_mut(s);
            let ys = combine(&y, h_step, head, &A[s][..s]);
            system.rhs(t + C[s] * h_step, &ys, &mut tail[0])?;
        }
        let y_new = combine(&y, h_step, &k[..6], &A[6][..6]);
        // k[6] was evaluated at y_new (FSAL)
        check_finite(t + h_step, &y_new)?;

        let accept = match opts.fixed_step {
            Some(_) => true,
            None => {
                let err = error_norm(&y, &y_new, h_step, &k, opts.tol);
                if !err.is_finite() {
                    return Err(Error::NonFinite(format!("error estimate at t = {t}")));
                }
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if err <= 1.0 {
                    h = h_step * factor;
                    true
                } else {
                    traj.rejected += 1;
                    h = h_step * factor.min(1.0);
                    false
                }
            }
        };
        if !accept {
            continue;
        }

        traj.segments.push(Segment {
            t,
            h: h_step,
            coeffs: dense_coefficients(&y, &y_new, h_step, &k),
        });
        t = if last { t1 } else { t + h_step };
        y = y_new;
        k.swap(0, 6);
        traj.accepted += 1;
        traj.nodes.push((t, y.clone()));
    }
    Ok(traj)
}

fn error_norm<S: OdeScalar>(y: &[S], y_new: &[S], h: f64, k: &[Vec<S>], tol: f64) -> f64 {
    let zero = vec![S::zero(); y.len()];
    let err = combine(&zero, h, k, &E);
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..y.len() {
        for p in 0..S::PARTS {
            let sc = tol * (1.0 + y[i].part(p).abs().max(y_new[i].part(p).abs()));
            sum += (err[i].part(p) / sc).powi(2);
            count += 1;
        }
    }
    (sum / count as f64).sqrt()
}

fn dense_coefficients<S: OdeScalar>(y: &[S], y_new: &[S], h: f64, k: &[Vec<S>]) -> [Vec<S>; 5] {
    let n = y.len();
    let mut c1 = Vec::with_capacity(n);
    let mut c2 = Vec::with_capacity(n);
    let mut c3 = Vec::with_capacity(n);
    for i in 0..n {
        let diff = y_new[i] - y[i];
        let bspl = k[0][i] * h - diff;
        c1.push(diff);
        c2.push(bspl);
        c3.push(diff - k[6][i] * h - bspl);
    }
    let zero = vec![S::zero(); n];
    let c4 = combine(&zero, h, k, &D);
    [y.to_vec(), c1, c2, c3, c4]
}

fn initial_step<S: OdeScalar>(y: &[S], dy: &[S], span: f64, tol: f64) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for (v, dv) in y.iter().zip(dy) {
        for p in 0..S::PARTS {
            let sc = 1.0 + v.part(p).abs();
            d0 = d0.max(v.part(p).abs() / sc);
            d1 = d1.max(dv.part(p).abs() / sc);
        }
    }
    let guess = if d1 < 1e-10 {
        1e-3 * span
    } else {
        0.01 * d0.max(1e-5) / d1
    };
    (guess * tol.powf(0.2) * 10.0)
        .min(0.1 * span)
        .max(1e-6 * span)
}
