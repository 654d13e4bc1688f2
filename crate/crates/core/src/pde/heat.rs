use crate::error::{Error, Result};
use crate::residual::Grid;

use super::{Boundary, Field1D};

/// Polynomial initial data `g(x) = Σ c_k x^k`, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyInitialData {
    pub coeffs: Vec<f64>,
}

impl PolyInitialData {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "polynomial coefficients must be finite".into(),
            ));
        }
        Ok(PolyInitialData { coeffs })
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        PolyInitialData { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// The data sampled on a grid at t = 0.
    pub fn field(&self, grid: &Grid) -> Result<Field1D> {
        Field1D::from_fn(grid.clone(), 0.0, |x| self.eval(x))
    }
}

/// `(d/dx x d/dx)^m x^k = (k!/(k−m)!)² x^{k−m}`, zero for `m > k`.
pub fn operator_power(m: usize, k: usize, x: f64) -> f64 {
    if m > k {
        return 0.0;
    }
    let falling: f64 = ((k - m + 1)..=k).map(|j| j as f64).product();
    falling * falling * x.powi((k - m) as i32)
}

fn operational_sum(g: &PolyInitialData, x: f64, weight: impl Fn(usize) -> f64) -> f64 {
    let d = g.degree();
    (0..=d)
        .map(|m| {
            let lg: f64 = g
                .coeffs
                .iter()
                .enumerate()
                .skip(m)
                .map(|(k, c)| c * operator_power(m, k, x))
                .sum();
            weight(m) * lg
        })
        .sum()
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|j| j as f64).product()
}

/// `e_0(tL) g = Σ_m t^m/(m!)² L^m g` with `L = d/dx x d/dx`.
///
/// This is a solution of `∂_t(t ∂_t F) = L F`; it solves `F_t = L F` only
/// for `deg g ≤ 1`. See [`laguerre_heat_exact`].
pub fn laguerre_heat_poly(g: &PolyInitialData, t: f64, x: f64) -> f64 {
    operational_sum(g, x, |m| {
        let f = factorial(m);
        t.powi(m as i32) / (f * f)
    })
}

/// `e^{tL} g = Σ_m t^m/m! L^m g`, the solution of `F_t = (x F_x)_x` with
/// `F(x, 0) = g(x)`.
pub fn laguerre_heat_exact(g: &PolyInitialData, t: f64, x: f64) -> f64 {
    operational_sum(g, x, |m| t.powi(m as i32) / factorial(m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatOptions {
    /// Record a slice every this many steps (the last step is always kept).
    pub save_every: usize,
    /// Abort when the max norm exceeds this multiple of the initial one.
    pub growth_limit: f64,
}

impl Default for HeatOptions {
    fn default() -> Self {
        HeatOptions {
            save_every: usize::MAX,
            growth_limit: 10.0,
        }
    }
}

/// Slices of a finite-difference run, starting with the initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatRun {
    pub slices: Vec<Field1D>,
    pub dt: f64,
    pub warnings: Vec<String>,
}

impl HeatRun {
    pub fn last(&self) -> &Field1D {
        &self.slices[self.slices.len() - 1]
    }
}

/// Crank–Nicolson solution of `F_t = (x F_x)_x` at `t_final`.
pub fn laguerre_heat_fd(g: &Field1D, t_final: f64, dt: f64) -> Result<Field1D> {
    let run = laguerre_heat_fd_with(g, t_final, dt, &HeatOptions::default())?;
    Ok(run.last().clone())
}

/// Crank–Nicolson run of `F_t = (x F_x)_x` on a uniform grid inside `[0, ∞)`.
///
/// Finite-volume form with face coefficients `x_{j±1/2}`: the first and
/// last cells are half cells with zero outer flux, which is the natural
/// condition at `x = 0` and `F_x = 0` at the right end. The step is
/// shrunk so that a whole number of steps reaches `t_final`.
pub fn laguerre_heat_fd_with(
    g: &Field1D,
    t_final: f64,
    dt: f64,
    opts: &HeatOptions,
) -> Result<HeatRun> {
    let h = g
        .grid
        .step()
        .ok_or_else(|| Error::InvalidGrid("Laguerre diffusion needs a uniform grid".into()))?;
    let xs = g.grid.points();
    if xs[0] < 0.0 {
        return Err(Error::InvalidGrid(format!("grid starts at {} < 0", xs[0])));
    }
    if !(t_final > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need t_final > 0 and dt > 0, got {t_final} and {dt}"
        )));
    }
    let steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let n = xs.len();

    let mut warnings = Vec::new();
    if n < 20 {
        warnings.push(format!("grid too coarse: {n} points"));
    }

    // tridiagonal L_h: sub[j] F_{j-1} + diag[j] F_j + sup[j] F_{j+1}
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    for j in 0..n {
        let left_face = if j > 0 {
            0.5 * (xs[j - 1] + xs[j])
        } else {
            0.0
        };
        let right_face = if j + 1 < n {
            0.5 * (xs[j] + xs[j + 1])
        } else {
            0.0
        };
        let width = if j == 0 || j + 1 == n { 0.5 * h } else { h };
        let a = left_face / (h * width);
        let b = right_face / (h * width);
        sub[j] = a;
        sup[j] = b;
        diag[j] = -(a + b);
    }

    // (I − dt/2 L_h) F^{n+1} = (I + dt/2 L_h) F^n
    let half = 0.5 * dt;
    let lhs_sub: Vec<f64> = sub.iter().map(|v| -half * v).collect();
    let lhs_diag: Vec<f64> = diag.iter().map(|v| 1.0 - half * v).collect();
    let lhs_sup: Vec<f64> = sup.iter().map(|v| -half * v).collect();

    let initial_norm = g.max_abs();
    let mut f = g.values.clone();
    let mut rhs = vec![0.0; n];
    let first = g
        .clone()
        .with_boundaries(Boundary::Natural, Boundary::Neumann);
    let mut slices = vec![first];
    for step in 1..=steps {
        for j in 0..n {
            let mut v = f[j] + half * diag[j] * f[j];
            if j > 0 {
                v += half * sub[j] * f[j - 1];
            }
            if j + 1 < n {
                v += half * sup[j] * f[j + 1];
            }
            rhs[j] = v;
        }
        f = thomas(&lhs_sub, &lhs_diag, &lhs_sup, &rhs)?;
        let t = step as f64 * dt;
        let norm = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !norm.is_finite() || (norm > opts.growth_limit * initial_norm && norm > 0.0) {
            return Err(Error::Unstable {
                t,
                initial: initial_norm,
                current: norm,
            });
        }
        if step % opts.save_every.max(1) == 0 || step == steps {
            let slice = Field1D::new(g.grid.clone(), f.clone(), t)?
                .with_boundaries(Boundary::Natural, Boundary::Neumann);
            slices.push(slice);
        }
    }
    Ok(HeatRun {
        slices,
        dt,
        warnings,
    })
}

/// Solves a tridiagonal system; `sub[0]` and `sup[n−1]` are ignored.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::DivisionByZero("singular tridiagonal system".into()));
    }
    c[0] = sup[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - sub[i] * c[i - 1];
        if beta == 0.0 {
            return Err(Error::DivisionByZero("singular tridiagonal system".into()));
        }
        c[i] = if i + 1 < n { sup[i] / beta } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residual::numeric_derivative;

    #[test]
    fn operational_examples() {
        let one = PolyInitialData::monomial(0);
        let x = PolyInitialData::monomial(1);
        let x2 = PolyInitialData::monomial(2);
        assert_eq!(laguerre_heat_poly(&one, 0.7, 2.0), 1.0);
        assert!((laguerre_heat_poly(&x, 0.7, 2.0) - 2.7).abs() < 1e-15);
        let (t, xv) = (0.3, 1.7);
        assert!((laguerre_heat_poly(&x2, t, xv) - (xv * xv + 4.0 * t * xv + t * t)).abs() < 1e-14);
        assert!(
            (laguerre_heat_exact(&x2, t, xv) - (xv * xv + 4.0 * t * xv + 2.0 * t * t)).abs()
                < 1e-14
        );
    }

    #[test]
    fn operator_power_values() {
        assert_eq!(operator_power(1, 2, 3.0), 12.0);
        assert_eq!(operator_power(2, 2, 3.0), 4.0);
        assert_eq!(operator_power(3, 2, 3.0), 0.0);
        assert_eq!(operator_power(3, 3, 5.0), 36.0);
    }

    fn laguerre_x<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let d1 = numeric_derivative(&f, x, 1, 1e-3).unwrap().value;
        let d2 = numeric_derivative(&f, x, 2, 1e-2).unwrap().value;
        d1 + x * d2
    }

    #[test]
    fn exponential_kernel_solves_diffusion() {
        let g = PolyInitialData::new(vec![0.5, -1.0, 0.25, 0.1]).unwrap();
        for &(t, x) in &[(0.3, 1.2), (1.0, 2.5)] {
            let ft = numeric_derivative(&|s| laguerre_heat_exact(&g, s, x), t, 1, 1e-3)
                .unwrap()
                .value;
            let lf = laguerre_x(|y| laguerre_heat_exact(&g, t, y), x);
            assert!((ft - lf).abs() < 1e-8, "{ft} vs {lf}");
        }
    }

    #[test]
    fn bessel_kernel_solves_the_laguerre_time_equation() {
        // e_0(tL) g satisfies ∂_t t ∂_t F = L F rather than F_t = L F
        let g = PolyInitialData::monomial(3);
        let (t, x) = (0.4, 1.3);
        let f = |s: f64| laguerre_heat_poly(&g, s, x);
        let ft = numeric_derivative(&f, t, 1, 1e-3).unwrap().value;
        let ftt = numeric_derivative(&f, t, 2, 1e-2).unwrap().value;
        let lf = laguerre_x(|y| laguerre_heat_poly(&g, t, y), x);
        assert!((ft + t * ftt - lf).abs() < 1e-8);
        assert!((ft - lf).abs() > 0.1);
    }

    #[test]
    fn constant_is_steady() {
        let grid = Grid::uniform(0.0, 10.0, 101).unwrap();
        let g = PolyInitialData::monomial(0).field(&grid).unwrap();
        let f = laguerre_heat_fd(&g, 0.5, 1e-2).unwrap();
        assert!(f.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert_eq!(f.time, 0.5);
    }

    #[test]
    fn linear_data_on_unit_step_grid() {
        let grid = Grid::uniform(0.0, 10.0, 501).unwrap();
        let g = PolyInitialData::monomial(1).field(&grid).unwrap();
        let f = laguerre_heat_fd(&g, 0.5, 1e-3).unwrap();
        for (x, v) in grid.iter().zip(&f.values) {
            if x <= 2.0 {
                assert!((v - (x + 0.5)).abs() < 1e-3, "x = {x}: {v}");
            }
        }
    }

    #[test]
    fn quadratic_data_follows_the_exponential_kernel() {
        let grid = Grid::uniform(0.0, 20.0, 1001).unwrap();
        let g = PolyInitialData::monomial(2);
        let f = laguerre_heat_fd(&g.field(&grid).unwrap(), 0.25, 1e-3).unwrap();
        let mut err_exact: f64 = 0.0;
        let mut err_bessel: f64 = 0.0;
        for (x, v) in grid.iter().zip(&f.values).filter(|(x, _)| *x <= 5.0) {
            err_exact = err_exact.max((v - laguerre_heat_exact(&g, 0.25, x)).abs());
            err_bessel = err_bessel.max((v - laguerre_heat_poly(&g, 0.25, x)).abs());
        }
        assert!(err_exact < 1e-2, "{err_exact}");
        // the e_0 form is off by t² = 0.0625
        assert!((err_bessel - 0.0625).abs() < 1e-2, "{err_bessel}");
    }

    #[test]
    fn rejects_bad_input() {
        let grid = Grid::uniform(-1.0, 1.0, 21).unwrap();
        let g = PolyInitialData::monomial(1).field(&grid).unwrap();
        assert!(laguerre_heat_fd(&g, 0.1, 1e-3).is_err());
        let grid = Grid::uniform(0.0, 1.0, 21).unwrap();
        let g = PolyInitialData::monomial(1).field(&grid).unwrap();
        assert!(laguerre_heat_fd(&g, 0.0, 1e-3).is_err());
        let uneven = Grid::from_points(vec![0.0, 0.1, 0.3, 0.6]).unwrap();
        let g = Field1D::from_fn(uneven, 0.0, |x| x).unwrap();
        assert!(matches!(
            laguerre_heat_fd(&g, 0.1, 1e-3),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn growth_is_flagged() {
        // the scheme obeys a maximum principle, so exercise the guard with a
        // limit below one
        let grid = Grid::uniform(0.0, 1.0, 41).unwrap();
        let g = PolyInitialData::monomial(1).field(&grid).unwrap();
        let opts = HeatOptions {
            growth_limit: 0.6,
            ..Default::default()
        };
        assert!(matches!(
            laguerre_heat_fd_with(&g, 1.0, 1e-2, &opts),
            Err(Error::Unstable { .. })
        ));
        let coarse = Grid::uniform(0.0, 1.0, 5).unwrap();
        let run = laguerre_heat_fd_with(
            &PolyInitialData::monomial(0).field(&coarse).unwrap(),
            0.1,
            0.05,
            &HeatOptions::default(),
        )
        .unwrap();
        assert_eq!(run.warnings.len(), 1);
    }
}
