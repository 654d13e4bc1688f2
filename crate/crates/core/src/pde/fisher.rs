use crate::error::{Error, Result};
use crate::residual::{assemble_report, DerivativeMode, Grid, ReportMeta, ResidualReport};

/// Sign of the wavenumber `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Positive,
    Negative,
}

/// Reaction rate, diffusivity and branch of `f_t − α f_xx = μ f(1 − f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherParams {
    pub mu: f64,
    pub alpha: f64,
    pub branch: Branch,
}

impl FisherParams {
    /// `μ = 0` is accepted and yields a degenerate (constant) profile.
    pub fn new(mu: f64, alpha: f64, branch: Branch) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mu must be non-negative, got {mu}"
            )));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(FisherParams { mu, alpha, branch })
    }

    /// `k = ±√(μ/(6α))`.
    pub fn k(&self) -> f64 {
        let k = (self.mu / (6.0 * self.alpha)).sqrt();
        match self.branch {
            Branch::Positive => k,
            Branch::Negative => -k,
        }
    }

    /// `V = −5αk`, the speed that pairs with `k` on either branch.
    pub fn speed(&self) -> f64 {
        -5.0 * self.alpha * self.k()
    }
}

/// `(σ, 1 − σ)` for the logistic `σ = 1/(1 + e^{−ξ})`, without overflow.
fn sigmoid(xi: f64) -> (f64, f64) {
    if xi >= 0.0 {
        let e = (-xi).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = xi.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    }
}

/// `A σ(ξ)²` and its first two ξ-derivatives.
fn profile(amplitude: f64, xi: f64) -> [f64; 3] {
    let (s, c) = sigmoid(xi);
    let f = s * s;
    [
        amplitude * f,
        amplitude * 2.0 * c * f,
        amplitude * 2.0 * c * (2.0 - 3.0 * s) * f,
    ]
}

/// `f = (1 + e^{−ξ})^{−2}`, `ξ = k(x − Vt)`.
pub fn fisher_wave(p: &FisherParams, x: f64, t: f64) -> f64 {
    profile(1.0, p.k() * (x - p.speed() * t))[0]
}

/// `(1/k²)(1 + e^{−ξ})^{−2}` with `V = +5αk`, the form with the printed
/// prefactor and sign pairing. Infinite for `μ = 0`.
pub fn fisher_wave_literal(p: &FisherParams, x: f64, t: f64) -> f64 {
    let k = p.k();
    profile(1.0 / (k * k), k * (x + 5.0 * p.alpha * k * t))[0]
}

fn wave_residual(p: &FisherParams, k: f64, v: f64, amplitude: f64, x: f64, t: f64) -> f64 {
    let [f, f1, f2] = profile(amplitude, k * (x - v * t));
    let ft = -k * v * f1;
    let fxx = k * k * f2;
    ft - p.alpha * fxx - p.mu * f * (1.0 - f)
}

fn residual_report(
    p: &FisherParams,
    grid: &Grid,
    times: &[f64],
    equation: &str,
    point: impl Fn(f64, f64) -> f64,
) -> Result<ResidualReport> {
    let mut residuals = Vec::with_capacity(grid.len() * times.len());
    let mut xs = Vec::with_capacity(residuals.capacity());
    let mut ts = Vec::with_capacity(residuals.capacity());
    for &t in times {
        for x in grid.iter() {
            residuals.push(point(x, t));
            xs.push(x);
            ts.push(t);
        }
    }
    let model = format!("fisher(mu={},alpha={})", p.mu, p.alpha);
    let meta = ReportMeta::new(model, equation, DerivativeMode::Analytic);
    Ok(assemble_report(residuals, 1e-6, meta)?
        .with_abscissa(xs)
        .with_times(ts))
}

/// Analytic residual of the travelling wave in `f_t − α f_xx − μ f(1 − f)`.
///
/// The notes carry the residual of the `1/k²`-prefactor form
/// ([`fisher_wave_literal`]) for comparison.
pub fn fisher_residual(p: &FisherParams, grid: &Grid, times: &[f64]) -> Result<ResidualReport> {
    if times.is_empty() {
        return Err(Error::EmptyResiduals);
    }
    let (k, v) = (p.k(), p.speed());
    let mut report = residual_report(p, grid, times, "fisher", |x, t| {
        wave_residual(p, k, v, 1.0, x, t)
    })?;
    if p.mu == 0.0 {
        report.meta = report.meta.with_note(
            "mu = 0: the profile degenerates to the constant 1/4; the check does not apply",
        );
    } else {
        let literal = fisher_literal_residual(p, grid, times)?;
        report.meta = report.meta.with_note(format!(
            "as-printed profile (1/k^2 prefactor, V = +5 alpha k): max={:e} l2={:e}",
            literal.max_norm, literal.l2_norm
        ));
    }
    Ok(report)
}

/// Residual of [`fisher_wave_literal`] in the same equation, as a
/// diagnostic report (it saturates at `6α/μ` instead of 1 and does not close).
pub fn fisher_literal_residual(
    p: &FisherParams,
    grid: &Grid,
    times: &[f64],
) -> Result<ResidualReport> {
    if times.is_empty() {
        return Err(Error::EmptyResiduals);
    }
    if p.mu == 0.0 {
        return Err(Error::InvalidParameter(
            "the 1/k^2 profile needs mu > 0".into(),
        ));
    }
    let k = p.k();
    let report = residual_report(p, grid, times, "fisher-literal", |x, t| {
        wave_residual(p, k, 5.0 * p.alpha * k, 1.0 / (k * k), x, t)
    })?;
    Ok(report.into_diagnostic())
}

/// Residual of the amplitude-1 profile with the wavenumber of `p` and an
/// arbitrary speed `v` (for pairing sensitivity checks).
pub fn fisher_pairing_residual(
    p: &FisherParams,
    v: f64,
    grid: &Grid,
    times: &[f64],
) -> Result<ResidualReport> {
    let k = p.k();
    residual_report(p, grid, times, "fisher", |x, t| {
        wave_residual(p, k, v, 1.0, x, t)
    })
}

/// Front speed measured from the `f = 1/4` level set: bisection for
/// `x(t)` on `[a, b]`, then a least-squares slope through `(t, x(t))`.
pub fn fisher_front_speed(p: &FisherParams, times: &[f64], (a, b): (f64, f64)) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::InvalidParameter("need at least two times".into()));
    }
    let mut pts = Vec::with_capacity(times.len());
    for &t in times {
        let g = |x: f64| fisher_wave(p, x, t) - 0.25;
        let (mut lo, mut hi) = (a, b);
        let (glo, ghi) = (g(lo), g(hi));
        if glo * ghi > 0.0 {
            return Err(Error::Domain {
                x: t,
                reason: format!("level set f = 1/4 not bracketed by [{a}, {b}]"),
            });
        }
        let rising = glo < ghi;
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if (g(m) < 0.0) == rising {
                lo = m;
            } else {
                hi = m;
            }
            if hi - lo <= 1e-14 * (1.0 + m.abs()) {
                break;
            }
        }
        pts.push((t, 0.5 * (lo + hi)));
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let xm = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - xm)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    if den == 0.0 {
        return Err(Error::InvalidParameter(
            "times must not all coincide".into(),
        ));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mu: f64, alpha: f64) -> FisherParams {
        FisherParams::new(mu, alpha, Branch::Positive).unwrap()
    }

    #[test]
    fn profile_values() {
        let p = params(6.0, 1.0);
        assert_eq!(p.k(), 1.0);
        assert_eq!(p.speed(), -5.0);
        assert_eq!(fisher_wave(&p, 0.0, 0.0), 0.25);
        assert!((fisher_wave(&p, 60.0, 0.0) - 1.0).abs() < 1e-15);
        assert!(fisher_wave(&p, -60.0, 0.0) < 1e-25);
        assert!((fisher_wave(&p, -5.0, 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn verified_profile_closes() {
        let g = Grid::uniform(-10.0, 10.0, 201).unwrap();
        for (mu, alpha) in [(6.0, 1.0), (1.0, 1.0), (2.0, 0.5)] {
            for branch in [Branch::Positive, Branch::Negative] {
                let p = FisherParams::new(mu, alpha, branch).unwrap();
                let r = fisher_residual(&p, &g, &[0.0, 0.5, 1.0]).unwrap();
                assert!(r.passed(), "mu {mu} alpha {alpha}: {}", r.max_norm);
                assert!(r.meta.notes[0].starts_with("as-printed"));
            }
        }
    }

    #[test]
    fn wrong_pairing_fails() {
        let p = params(6.0, 1.0);
        let g = Grid::uniform(-10.0, 10.0, 201).unwrap();
        let r = fisher_pairing_residual(&p, -p.speed(), &g, &[0.0, 0.5, 1.0]).unwrap();
        assert!(r.max_norm > 0.1);
    }

    #[test]
    fn literal_profile_saturates_at_six_alpha_over_mu() {
        let p = params(1.0, 1.0);
        assert!((fisher_wave_literal(&p, 200.0, 0.0) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn literal_profile_is_diagnostic() {
        let p = params(6.0, 1.0);
        let g = Grid::uniform(-10.0, 10.0, 201).unwrap();
        let r = fisher_literal_residual(&p, &g, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(r.verdict, crate::Verdict::Diagnostic);
        assert!(r.max_norm > 1e-2);
        assert!(fisher_literal_residual(&params(0.0, 1.0), &g, &[0.0]).is_err());
    }

    #[test]
    fn zero_reaction_is_flagged() {
        let p = params(0.0, 1.0);
        let g = Grid::uniform(-1.0, 1.0, 11).unwrap();
        let r = fisher_residual(&p, &g, &[0.0, 1.0]).unwrap();
        assert_eq!(r.max_norm, 0.0);
        assert!(r.meta.notes[0].contains("does not apply"));
    }

    #[test]
    fn measured_speed() {
        let p = params(2.0, 0.5);
        let v = fisher_front_speed(&p, &[0.0, 0.5, 1.0], (-20.0, 20.0)).unwrap();
        assert!((v.abs() / (5.0 * p.alpha * p.k().abs()) - 1.0).abs() < 1e-10);
    }
}
