//! Residual checks selectable by name with `residual --equation`.
//!
//! The governing equations of the logistic catalogue are wrapped as they
//! come from the library registry; the remaining checks cover the Tricomi
//! eigen-relations, the linear counterparts, the Laguerre-heat transforms,
//! the Fisher wave and the FEL field equation.

use std::str::FromStr;

use num_complex::Complex64;

use logimath::logistic::{EquationRegistry, ResidualOptions};
use logimath::ode::{
    fel_amplitude, fel_trajectory_residual, linear_counterpart_residual, FelParams,
};
use logimath::pde::{
    fisher_front_speed, fisher_literal_residual, fisher_residual, hopf_cole_u,
    laguerre_burgers_residual, laguerre_heat_exact, laguerre_heat_fd_with, log_potential_residual,
    Branch, Field1D, FisherParams, HeatOptions, PolyInitialData,
};
use logimath::special_fn::{eigen_residual, eigen_residual_fd, korf_residual};
use logimath::{DerivativeMode, Grid, ResidualReport, SeriesPolicy};

use crate::config::{Entry, RunConfig};
use crate::error::{CliError, CliResult};
use crate::models::ModelRegistry;

pub trait ResidualCheck: Send + Sync {
    fn name(&self) -> &'static str;

    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    fn description(&self) -> &'static str;

    fn run(&self, cfg: &RunConfig, models: &ModelRegistry) -> CliResult<ResidualReport>;
}

fn mode(cfg: &RunConfig) -> CliResult<DerivativeMode> {
    match cfg.setting("mode") {
        None => Ok(DerivativeMode::Analytic),
        Some(e) => DerivativeMode::from_str(&e.value)
            .map_err(|err| CliError::parse(&e.origin, err.to_string())),
    }
}

/// `poly:c0,c1,...` with ascending coefficients.
pub fn poly_init(cfg: &RunConfig, default: &str) -> CliResult<PolyInitialData> {
    let fallback = Entry::new(default, crate::error::Origin::Flag("init".into()));
    let e = cfg.setting("init").unwrap_or(&fallback);
    let bad = |msg: String| CliError::parse(&e.origin, msg);
    let body = e.value.strip_prefix("poly:").ok_or_else(|| {
        bad(format!(
            "init: expected poly:c0,c1,..., found '{}'",
            e.value
        ))
    })?;
    let coeffs = body
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("init: '{}' is not a number", c.trim())))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    Ok(PolyInitialData::new(coeffs)?)
}

fn complex_param(cfg: &RunConfig, key: &str, default: f64) -> CliResult<Complex64> {
    match cfg.param_entry(key) {
        None => Ok(Complex64::new(default, 0.0)),
        Some(e) => Complex64::from_str(&e.value)
            .ok()
            .filter(|c| c.is_finite())
            .ok_or_else(|| {
                CliError::parse(
                    &e.origin,
                    format!("{key}: '{}' is not a complex number", e.value),
                )
            }),
    }
}

/// `nu` (0), `g0` (1), `l0` (1e-3) and `lF` (1); fields accept `a+bi`.
pub fn fel_params(cfg: &RunConfig) -> CliResult<FelParams> {
    let nu = cfg.param_or("nu", 0.0)?;
    let g0 = cfg.param_or("g0", 1.0)?;
    let l0 = complex_param(cfg, "l0", 1e-3)?;
    let l_f = complex_param(cfg, "lF", 1.0)?;
    Ok(FelParams::new(nu, g0, l0, l_f)?)
}

pub fn fisher_params(cfg: &RunConfig) -> CliResult<FisherParams> {
    let mu = cfg.require_param(&["mu"], "fisher")?;
    let alpha = cfg.require_param(&["alpha"], "fisher")?;
    let branch = match cfg.param_entry("branch") {
        None => Branch::Positive,
        Some(e) => match e.value.as_str() {
            "+" | "+1" | "1" | "positive" => Branch::Positive,
            "-" | "-1" | "negative" => Branch::Negative,
            other => {
                return Err(CliError::parse(
                    &e.origin,
                    format!("branch: expected + or -, found '{other}'"),
                ))
            }
        },
    };
    Ok(FisherParams::new(mu, alpha, branch)?)
}

/// One entry of the library's governing-equation registry.
struct Governing {
    name: &'static str,
    aliases: &'static [&'static str],
    description: &'static str,
}

impl ResidualCheck for Governing {
    fn name(&self) -> &'static str {
        self.name
    }

    fn aliases(&self) -> &'static [&'static str] {
        self.aliases
    }

    fn description(&self) -> &'static str {
        self.description
    }

    fn run(&self, cfg: &RunConfig, models: &ModelRegistry) -> CliResult<ResidualReport> {
        let name = &cfg.require("model")?.value;
        let built = models.build(name, cfg)?;
        let grid = cfg.grid("grid")?;
        let opts = ResidualOptions {
            mode: mode(cfg)?,
            tol: Some(cfg.tol()?),
            delta: cfg.f64_setting("delta")?.unwrap_or(1e-6),
            policy: SeriesPolicy::default(),
        };
        Ok(EquationRegistry::builtin().check(self.name, &built.model, &grid, &opts)?)
    }
}

struct Eigen;

impl ResidualCheck for Eigen {
    fn name(&self) -> &'static str {
        "eigen"
    }

    fn description(&self) -> &'static str {
        "Laguerre derivative eigenrelation of e_nu(lambda x); params nu, lambda"
    }

    fn run(&self, cfg: &RunConfig, _: &ModelRegistry) -> CliResult<ResidualReport> {
        let nu = cfg.param_or("nu", 0.0)?;
        let lambda = cfg.require_param(&["lambda"], self.name())?;
        let grid = cfg.grid("grid")?;
        let policy = SeriesPolicy::default();
        let tol = cfg.tol()?;
        Ok(match mode(cfg)? {
            DerivativeMode::Analytic => eigen_residual(nu, lambda, &grid, &policy, tol)?,
            DerivativeMode::FiniteDifference => eigen_residual_fd(nu, lambda, &grid, &policy, tol)?,
        })
    }
}

struct Korf;

impl ResidualCheck for Korf {
    fn name(&self) -> &'static str {
        "korf"
    }

    fn description(&self) -> &'static str {
        "d/dt(t dN/dt) = lambda alpha^2 t^(alpha-1) N for N = e_0(lambda t^alpha); params lambda, alpha"
    }

    fn run(&self, cfg: &RunConfig, _: &ModelRegistry) -> CliResult<ResidualReport> {
        let lambda = cfg.require_param(&["lambda"], self.name())?;
        let alpha = cfg.require_param(&["alpha"], self.name())?;
        let grid = cfg.grid("grid")?;
        Ok(korf_residual(
            lambda,
            alpha,
            &grid,
            &SeriesPolicy::default(),
            cfg.tol()?,
        )?)
    }
}

struct LinearCounterpart;

impl ResidualCheck for LinearCounterpart {
    fn name(&self) -> &'static str {
        "linear-counterpart"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["richards-linear"]
    }

    fn description(&self) -> &'static str {
        "linear ODE of Y = F^(-n) along an integrated trajectory (classical, normalized, richards, variable-rate)"
    }

    fn run(&self, cfg: &RunConfig, models: &ModelRegistry) -> CliResult<ResidualReport> {
        let built = models.build(&cfg.require("model")?.value, cfg)?;
        let grid = cfg.grid("grid")?;
        let ode_tol = cfg.f64_setting("ode-tol")?.unwrap_or(1e-13);
        Ok(linear_counterpart_residual(
            &built.model,
            &grid,
            ode_tol,
            cfg.tol()?,
        )?)
    }
}

#[derive(Clone, Copy)]
enum Transform {
    Burgers,
    LogPotential,
}

/// Hopf–Cole or log-potential residual on a stack of Laguerre-heat slices.
struct HeatTransform(Transform);

impl HeatTransform {
    /// Slices `0, dt, …, t` from the exact kernel or the FD solver.
    fn stack(cfg: &RunConfig) -> CliResult<(Vec<Field1D>, f64, Vec<String>)> {
        let g = poly_init(cfg, "poly:1,1")?;
        let grid = cfg.grid("grid")?;
        let t = cfg.f64_setting("t")?.unwrap_or(0.1);
        let dt = cfg.f64_setting("dt")?.unwrap_or(1e-4);
        if !(t > 0.0 && dt > 0.0) {
            return Err(CliError::Usage("t and dt must be positive".into()));
        }
        let source = cfg.setting("source").map_or("exact", |e| e.value.as_str());
        let (mut stack, dt, warnings) = match source {
            "exact" => {
                let steps = ((t / dt).round() as usize).max(2);
                let dt = t / steps as f64;
                let stack = (0..=steps)
                    .map(|k| {
                        let tk = k as f64 * dt;
                        Field1D::from_fn(grid.clone(), tk, |x| laguerre_heat_exact(&g, tk, x))
                    })
                    .collect::<logimath::Result<Vec<_>>>()?;
                (stack, dt, Vec::new())
            }
            "fd" => {
                let opts = HeatOptions {
                    save_every: 1,
                    ..Default::default()
                };
                let run = laguerre_heat_fd_with(&g.field(&grid)?, t, dt, &opts)?;
                (run.slices, run.dt, run.warnings)
            }
            other => {
                let origin = &cfg.setting("source").unwrap().origin;
                return Err(CliError::parse(
                    origin,
                    format!("source: expected exact or fd, found '{other}'"),
                ));
            }
        };
        if let Some((lo, hi)) = cfg.range("window")? {
            stack = stack
                .iter()
                .map(|s| s.window(lo, hi))
                .collect::<logimath::Result<Vec<_>>>()?;
        }
        Ok((stack, dt, warnings))
    }
}

impl ResidualCheck for HeatTransform {
    fn name(&self) -> &'static str {
        match self.0 {
            Transform::Burgers => "laguerre-burgers",
            Transform::LogPotential => "log-potential",
        }
    }

    fn description(&self) -> &'static str {
        match self.0 {
            Transform::Burgers => {
                "u = F_x/F of a Laguerre-heat stack in the nonlinear Laguerre-Burgers equation"
            }
            Transform::LogPotential => {
                "u = ln F of a Laguerre-heat stack in the log-potential equation"
            }
        }
    }

    fn run(&self, cfg: &RunConfig, _: &ModelRegistry) -> CliResult<ResidualReport> {
        let (stack, dt, warnings) = Self::stack(cfg)?;
        let tol = cfg.tol()?;
        let mut report = match self.0 {
            Transform::Burgers => {
                let u = stack
                    .iter()
                    .map(hopf_cole_u)
                    .collect::<logimath::Result<Vec<_>>>()?;
                laguerre_burgers_residual(&u, dt, tol)?
            }
            Transform::LogPotential => log_potential_residual(&stack, dt, tol)?,
        };
        for w in warnings {
            report.meta = report.meta.with_note(w);
        }
        Ok(report)
    }
}

struct Fisher;

impl ResidualCheck for Fisher {
    fn name(&self) -> &'static str {
        "fisher"
    }

    fn description(&self) -> &'static str {
        "travelling wave in f_t - alpha f_xx = mu f (1 - f); params mu, alpha, branch; --paper-literal for the 1/k^2 form"
    }

    fn run(&self, cfg: &RunConfig, _: &ModelRegistry) -> CliResult<ResidualReport> {
        let p = fisher_params(cfg)?;
        let grid = cfg.grid("grid")?;
        let times = cfg.list("times")?.unwrap_or_else(|| vec![0.0, 0.5, 1.0]);
        if cfg.flag("paper-literal")? {
            return Ok(fisher_literal_residual(&p, &grid, &times)?);
        }
        let mut report = fisher_residual(&p, &grid, &times)?;
        report.tolerance = cfg.tol()?;
        report.verdict = if report.max_norm <= report.tolerance {
            logimath::Verdict::Pass
        } else {
            logimath::Verdict::Fail
        };
        if p.mu > 0.0 {
            if let Ok(v) = fisher_front_speed(&p, &times, (grid.start(), grid.end())) {
                let expected = 5.0 * p.alpha * p.k().abs();
                report.meta = report
                    .meta
                    .with_note(format!("front speed {v:e} (5 alpha |k| = {expected:e})"));
            }
        }
        Ok(report)
    }
}

struct FelField;

impl ResidualCheck for FelField {
    fn name(&self) -> &'static str {
        "fel-5.13"
    }

    fn description(&self) -> &'static str {
        "nonlinear FEL field equation along the amplitude trajectory (diagnostic); nu, g0, l0, lF, --tau-max"
    }

    fn run(&self, cfg: &RunConfig, _: &ModelRegistry) -> CliResult<ResidualReport> {
        let p = fel_params(cfg)?;
        let tau_max = cfg.f64_setting("tau-max")?.unwrap_or(10.0);
        let samples = cfg.usize_setting("samples")?.unwrap_or(201);
        let ode_tol = cfg.f64_setting("ode-tol")?.unwrap_or(1e-12);
        let traj = fel_amplitude(&p, tau_max, ode_tol)?;
        let grid = Grid::uniform(0.0, tau_max, samples)?;
        Ok(fel_trajectory_residual(&traj, &p, &grid)?)
    }
}

/// Checks by name or alias.
pub struct CheckRegistry {
    checks: Vec<Box<dyn ResidualCheck>>,
}

impl Default for CheckRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl CheckRegistry {
    pub fn builtin() -> Self {
        let mut checks: Vec<Box<dyn ResidualCheck>> = EquationRegistry::builtin()
            .iter()
            .map(|eq| {
                Box::new(Governing {
                    name: eq.name(),
                    aliases: eq.aliases(),
                    description: eq.description(),
                }) as Box<dyn ResidualCheck>
            })
            .collect();
        checks.push(Box::new(Eigen));
        checks.push(Box::new(Korf));
        checks.push(Box::new(LinearCounterpart));
        checks.push(Box::new(HeatTransform(Transform::Burgers)));
        checks.push(Box::new(HeatTransform(Transform::LogPotential)));
        checks.push(Box::new(Fisher));
        checks.push(Box::new(FelField));
        CheckRegistry { checks }
    }

    pub fn register(&mut self, check: Box<dyn ResidualCheck>) {
        self.checks.retain(|c| c.name() != check.name());
        self.checks.push(check);
    }

    pub fn get(&self, name: &str) -> Option<&dyn ResidualCheck> {
        self.checks
            .iter()
            .find(|c| c.name() == name || c.aliases().contains(&name))
            .map(|b| b.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn ResidualCheck> {
        self.checks.iter().map(|b| b.as_ref())
    }
}
