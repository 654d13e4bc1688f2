//! Subcommand bodies. Each returns an [`Outcome`]; nothing here writes to
//! the terminal.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use logimath::logistic::{linearize, EquationRegistry, LogisticModel};
use logimath::ode::{
    fel_amplitude, fel_gain_rate, fel_logistic_field, gain_length, integrate, LinearizedSystem,
    ModelSystem,
};
use logimath::pde::{
    fisher_wave, fisher_wave_literal, hopf_cole_u, laguerre_heat_exact, laguerre_heat_fd_with,
    laguerre_heat_poly, stack_to_csv, Field1D, HeatOptions,
};
use logimath::residual::format_value;
use logimath::{Grid, SeriesPolicy, Verdict};

use crate::args::CommandArgs;
use crate::checks::{fel_params, fisher_params, poly_init, CheckRegistry};
use crate::config::{parse_config, parse_params, Entry, RunConfig};
use crate::error::{CliError, CliResult, Origin};
use crate::models::ModelRegistry;

/// Settings every subcommand accepts in a config file.
const COMMON_SETTINGS: [&str; 2] = ["output", "stdout"];

/// What a subcommand produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    /// CSV (or listing) body.
    pub data: String,
    /// Verdicts and summaries.
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
    /// A residual check failed; exit code 1.
    pub failed: bool,
}

impl Outcome {
    fn data(data: String) -> Self {
        Outcome {
            data,
            ..Default::default()
        }
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed)
    }
}

/// Merges the config file, the subcommand flags and the parameters.
pub fn build_config<A: CommandArgs>(args: &A, file: Option<&Path>) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::new(A::NAME, RunConfig::env_tolerance()?);
    if let Some(path) = file {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: shown.clone(),
            source,
        })?;
        let keys: Vec<&str> = A::SETTINGS
            .iter()
            .chain(&COMMON_SETTINGS)
            .copied()
            .collect();
        cfg.load_file(parse_config(&shown, &text)?, &keys);
    }
    for (key, value) in args.settings() {
        cfg.set(key, value);
    }
    for (key, on) in args.switches() {
        cfg.set_flag(key, on);
    }
    let mut params = match args.params() {
        Some(text) => parse_params(text)?,
        None => Vec::new(),
    };
    for (key, value) in args.param_flags() {
        if let Some(v) = value {
            params.push((
                key.to_string(),
                Entry::new(v, Origin::Flag(key.to_string())),
            ));
        }
    }
    cfg.add_cli_params(params)?;
    Ok(cfg)
}

fn parse_err(cfg: &RunConfig, key: &str, message: String) -> CliError {
    match cfg.setting(key) {
        Some(e) => CliError::parse(&e.origin, message),
        None => CliError::Usage(message),
    }
}

/// `x,value`, or `x,<model>,...` with `--compare`. Points where a model is
/// undefined are left empty and summarised in a warning.
pub fn cmd_eval(cfg: &RunConfig, models: &ModelRegistry) -> CliResult<Outcome> {
    let (names, compare): (Vec<String>, bool) = match (cfg.setting("model"), cfg.setting("compare"))
    {
        (Some(m), None) => (vec![m.value.clone()], false),
        (None, Some(c)) => (
            c.value.split(',').map(|s| s.trim().to_string()).collect(),
            true,
        ),
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "eval: --model and --compare exclude each other".into(),
            ))
        }
        (None, None) => return Err(CliError::Usage("eval: missing --model or --compare".into())),
    };
    let built = names
        .iter()
        .map(|n| models.build(n, cfg))
        .collect::<CliResult<Vec<_>>>()?;
    cfg.ensure_consumed(&names.join(","))?;
    let grid = cfg.grid("grid")?;
    let policy = SeriesPolicy::default();

    let mut out = Outcome::default();
    out.data.push('x');
    if compare {
        for b in &built {
            write!(out.data, ",{}", b.name).unwrap();
        }
    } else {
        out.data.push_str(",value");
    }
    out.data.push('\n');

    // per model: count of undefined points and the first failure
    let mut gaps: Vec<(usize, Option<(f64, String)>)> = vec![(0, None); built.len()];
    for x in grid.iter() {
        out.data.push_str(&format_value(x));
        for (b, gap) in built.iter().zip(&mut gaps) {
            out.data.push(',');
            match b.model.evaluate(x, &policy) {
                Ok(v) => out.data.push_str(&format_value(b.scale * v)),
                Err(e) => {
                    gap.0 += 1;
                    gap.1.get_or_insert((x, e.to_string()));
                }
            }
        }
        out.data.push('\n');
    }
    for (b, (count, first)) in built.iter().zip(gaps) {
        if let Some((x, reason)) = first {
            out.warnings.push(format!(
                "{}: {count} of {} points undefined, first at x = {x}: {reason}",
                b.name,
                grid.len()
            ));
        }
    }
    Ok(out)
}

/// Residual CSV plus the verdict line; FAIL sets the exit code.
pub fn cmd_residual(
    cfg: &RunConfig,
    models: &ModelRegistry,
    checks: &CheckRegistry,
) -> CliResult<Outcome> {
    let name = match cfg.setting("equation") {
        Some(e) => e.value.clone(),
        None => {
            let model = cfg.require("model").map_err(|_| {
                CliError::Usage(
                    "residual: missing --equation (or --model to use its own equation)".into(),
                )
            })?;
            let built = models.build(&model.value, cfg)?;
            EquationRegistry::builtin()
                .default_for(&built.model)
                .map(|eq| eq.name().to_string())
                .ok_or_else(|| {
                    CliError::Usage(format!("residual: no default equation for {}", model.value))
                })?
        }
    };
    let check = checks.get(&name).ok_or_else(|| {
        let known: Vec<&str> = checks.iter().map(|c| c.name()).collect();
        parse_err(
            cfg,
            "equation",
            format!("unknown equation '{name}' (known: {})", known.join(", ")),
        )
    })?;
    let report = check.run(cfg, models)?;
    cfg.ensure_consumed(check.name())?;
    Ok(Outcome {
        data: report.to_csv(),
        messages: vec![report.verdict_line()],
        warnings: Vec::new(),
        failed: report.verdict == Verdict::Fail,
    })
}

fn uniform_samples(cfg: &RunConfig, (t0, t1): (f64, f64)) -> CliResult<Option<Grid>> {
    match cfg.usize_setting("samples")? {
        None => Ok(None),
        Some(n) => Ok(Some(Grid::uniform(t0, t1, n)?)),
    }
}

/// Integrates the growth law from the closed form at the start of the span.
pub fn cmd_ode(cfg: &RunConfig, models: &ModelRegistry) -> CliResult<Outcome> {
    let built = models.build(&cfg.require("model")?.value, cfg)?;
    cfg.ensure_consumed(built.name)?;
    let span = cfg
        .range("span")?
        .ok_or_else(|| CliError::Usage("ode: missing --span".into()))?;
    let tol = cfg.tol()?;
    let model: &LogisticModel = &built.model;
    let policy = SeriesPolicy::default();
    let f0 = model.evaluate(span.0, &policy)?;

    let (traj, back): (_, Box<dyn Fn(f64) -> f64>) = if cfg.flag("linearized")? {
        let desc = linearize(model)?;
        let traj = integrate(
            &LinearizedSystem::new(&desc),
            &[desc.forward(f0)],
            span,
            tol,
        )?;
        (traj, Box::new(move |y| desc.inverse(y)))
    } else {
        (
            integrate(&ModelSystem::new(model)?, &[f0], span, tol)?,
            Box::new(|y| y),
        )
    };
    let rows = match uniform_samples(cfg, span)? {
        Some(grid) => traj.sample(grid.points())?,
        None => traj.nodes.clone(),
    };
    let mut data = String::from("t,value\n");
    for (t, y) in &rows {
        writeln!(
            data,
            "{},{}",
            format_value(*t),
            format_value(built.scale * back(y[0]))
        )
        .unwrap();
    }

    let end = built.scale * back(traj.final_state()[0]);
    let closed = built.scale * model.evaluate(span.1, &policy)?;
    let messages = vec![format!(
        "endpoint t={} value={} closed_form={} abs_diff={:e} steps={} rejected={}",
        span.1,
        format_value(end),
        format_value(closed),
        (end - closed).abs(),
        traj.accepted,
        traj.rejected
    )];
    Ok(Outcome {
        data,
        messages,
        ..Default::default()
    })
}

fn x_value_csv(field: &Field1D, extra: Option<&dyn Fn(f64) -> f64>, extra_name: &str) -> String {
    let mut out = String::from("x,value");
    if extra.is_some() {
        write!(out, ",{extra_name}").unwrap();
    }
    out.push('\n');
    for (x, v) in field.grid.iter().zip(&field.values) {
        write!(out, "{},{}", format_value(x), format_value(*v)).unwrap();
        if let Some(f) = extra {
            write!(out, ",{}", format_value(f(x))).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Laguerre-heat solution at `t` by the chosen method; FD also returns its
/// warnings and, with `save-every`, the intermediate slices.
fn heat_solution(
    cfg: &RunConfig,
    g: &logimath::pde::PolyInitialData,
    grid: &Grid,
    t: f64,
) -> CliResult<(Vec<Field1D>, Vec<String>)> {
    let method = cfg.setting("method").map_or("fd", |e| e.value.as_str());
    match method {
        "fd" => {
            let dt = cfg.f64_setting("dt")?.unwrap_or(1e-3);
            let opts = HeatOptions {
                save_every: cfg
                    .usize_setting("save-every")?
                    .unwrap_or(usize::MAX)
                    .max(1),
                ..Default::default()
            };
            let run = laguerre_heat_fd_with(&g.field(grid)?, t, dt, &opts)?;
            Ok((run.slices, run.warnings))
        }
        "exact" => Ok((
            vec![Field1D::from_fn(grid.clone(), t, |x| {
                laguerre_heat_exact(g, t, x)
            })?],
            Vec::new(),
        )),
        "series" => Ok((
            vec![Field1D::from_fn(grid.clone(), t, |x| {
                laguerre_heat_poly(g, t, x)
            })?],
            Vec::new(),
        )),
        other => Err(parse_err(
            cfg,
            "method",
            format!("method: expected fd, exact or series, found '{other}'"),
        )),
    }
}

pub fn cmd_pde(cfg: &RunConfig) -> CliResult<Outcome> {
    let equation = cfg
        .setting("equation")
        .map_or("laguerre-heat", |e| e.value.as_str());
    match equation {
        "laguerre-heat" | "hopf-cole" => heat_command(cfg, equation == "hopf-cole"),
        "fisher" => fisher_command(cfg),
        other => Err(parse_err(
            cfg,
            "equation",
            format!("unknown pde equation '{other}' (known: laguerre-heat, hopf-cole, fisher)"),
        )),
    }
}

fn heat_command(cfg: &RunConfig, hopf_cole: bool) -> CliResult<Outcome> {
    cfg.ensure_consumed("pde")?;
    let g = poly_init(cfg, "poly:1")?;
    let t = cfg
        .f64_setting("t")?
        .ok_or_else(|| CliError::Usage("pde: missing --t".into()))?;
    let grid = cfg.grid("grid")?;
    let (slices, warnings) = heat_solution(cfg, &g, &grid, t)?;
    let stacked = cfg.setting("save-every").is_some();
    let slices = if stacked {
        slices
    } else {
        vec![slices[slices.len() - 1].clone()]
    };
    let mut out = Outcome {
        warnings,
        ..Default::default()
    };
    let exact = |x: f64| laguerre_heat_exact(&g, t, x);

    if hopf_cole {
        let u = slices
            .iter()
            .map(hopf_cole_u)
            .collect::<logimath::Result<Vec<_>>>()?;
        out.data = if stacked {
            stack_to_csv(&u)
        } else {
            x_value_csv(&u[0], None, "")
        };
        return Ok(out);
    }

    let last = &slices[slices.len() - 1];
    out.data = if stacked {
        stack_to_csv(&slices)
    } else {
        x_value_csv(last, Some(&exact), "exact")
    };
    // the zero-flux right end bends the FD solution away from e^(tL) g, so
    // the left half is reported on its own as well
    let half = 0.5 * (last.grid.start() + last.grid.end());
    let worst = |lim: f64| {
        last.grid
            .iter()
            .zip(&last.values)
            .filter(|(x, _)| *x <= lim)
            .map(|(x, v)| ((v - exact(x)).abs(), x))
            .fold((0.0, f64::NAN), |m, e| if e.0 > m.0 { e } else { m })
    };
    let (err, at) = worst(f64::INFINITY);
    if err > 0.0 {
        let (inner, _) = worst(half);
        out.messages.push(format!(
            "max |value - exact| = {err:e} at x = {at}; {inner:e} on x <= {half} (exact = e^(tL) g)"
        ));
    }
    Ok(out)
}

fn fisher_command(cfg: &RunConfig) -> CliResult<Outcome> {
    let p = fisher_params(cfg)?;
    cfg.ensure_consumed("fisher")?;
    let grid = cfg.grid("grid")?;
    let times = cfg.list("times")?.unwrap_or_else(|| vec![0.0]);
    let literal = cfg.flag("paper-literal")?;
    let profile = |x: f64, t: f64| {
        if literal {
            fisher_wave_literal(&p, x, t)
        } else {
            fisher_wave(&p, x, t)
        }
    };
    let stack = times
        .iter()
        .map(|&t| Field1D::from_fn(grid.clone(), t, |x| profile(x, t)))
        .collect::<logimath::Result<Vec<_>>>()?;
    let mut out = Outcome::data(stack_to_csv(&stack));
    out.messages.push(format!(
        "k = {} speed = {}{}",
        format_value(p.k()),
        format_value(p.speed()),
        if literal { " (as-printed profile)" } else { "" }
    ));
    Ok(out)
}

/// `tau,re_a,im_a,abs_l` preceded by `#` summary lines.
pub fn cmd_fel(cfg: &RunConfig) -> CliResult<Outcome> {
    let p = fel_params(cfg)?;
    cfg.ensure_consumed("fel")?;
    let tau_max = cfg.f64_setting("tau-max")?.unwrap_or(10.0);
    let tol = cfg.f64_setting("tol")?.unwrap_or(1e-10);
    let traj = fel_amplitude(&p, tau_max, tol)?;
    let rows = match uniform_samples(cfg, (0.0, tau_max))? {
        Some(grid) => traj.sample(grid.points())?,
        None => traj.nodes.clone(),
    };
    let field = fel_logistic_field(&rows, &p)?;

    let state = traj.final_state();
    let measured = if state[0].norm() > 0.0 {
        (state[1] / state[0]).re
    } else {
        f64::NAN
    };
    let last_l: Complex64 = field.l[field.l.len() - 1];
    let mut data = String::new();
    writeln!(data, "# gain_rate={}", format_value(fel_gain_rate(&p))).unwrap();
    writeln!(data, "# gain_length={}", format_value(gain_length(&p))).unwrap();
    writeln!(data, "# measured_rate={}", format_value(measured)).unwrap();
    writeln!(
        data,
        "# final_abs_l_over_abs_lF={}",
        format_value(last_l.norm() / p.l_f.norm())
    )
    .unwrap();
    writeln!(
        data,
        "# inversion_error={}",
        format_value(field.inversion_error)
    )
    .unwrap();
    data.push_str("tau,re_a,im_a,abs_l\n");
    for ((tau, a), l) in field.tau.iter().zip(&field.a).zip(&field.l) {
        writeln!(
            data,
            "{},{},{},{}",
            format_value(*tau),
            format_value(a.re),
            format_value(a.im),
            format_value(l.norm())
        )
        .unwrap();
    }
    Ok(Outcome::data(data))
}

pub fn cmd_list(models: &ModelRegistry, checks: &CheckRegistry) -> Outcome {
    let mut data = String::from("models:\n");
    for m in models.iter() {
        writeln!(data, "  {:<18} {}", m.name(), m.keys()).unwrap();
    }
    data.push_str("residual equations:\n");
    for c in checks.iter() {
        let aliases = if c.aliases().is_empty() {
            String::new()
        } else {
            format!(" (also {})", c.aliases().join(", "))
        };
        writeln!(data, "  {:<24} {}{aliases}", c.name(), c.description()).unwrap();
    }
    data.push_str("pde equations:\n  laguerre-heat\n  hopf-cole\n  fisher\n");
    Outcome::data(data)
}
