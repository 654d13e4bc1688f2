use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Generalized logistic functions: evaluation, residual verification,
/// ODE and PDE runs. Data is written as CSV.
#[derive(Debug, Parser)]
#[command(name = "logimath", version)]
pub struct Cli {
    /// `key = value` file; flags given on the command line override it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write the data to this file instead of stdout
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<String>,

    /// Keep stdout for data only; verdicts and summaries go to stderr
    #[arg(long, global = true)]
    pub stdout: bool,

    #[command(subcommand)]
    pub command: Command,
}

// parsed once per process, so the size of the largest variant is irrelevant
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one model, or several side by side, on a grid
    Eval(EvalArgs),
    /// Residual of a governing equation; exit 0 on PASS or DIAG, 1 on FAIL
    Residual(ResidualArgs),
    /// Integrate the growth law of a model
    Ode(OdeArgs),
    /// Laguerre diffusion, its Hopf–Cole field, or Fisher wave profiles
    Pde(PdeArgs),
    /// FEL amplitude, logistic field and gain rate
    Fel(FelArgs),
    /// List models, residual checks and PDE equations
    List,
}

/// Settings, switches and parameters a subcommand contributes to the run
/// configuration.
pub trait CommandArgs {
    const NAME: &'static str;
    /// Keys that are settings (not parameters) in config files.
    const SETTINGS: &'static [&'static str];

    fn settings(&self) -> Vec<(&'static str, Option<String>)>;

    fn switches(&self) -> Vec<(&'static str, bool)> {
        Vec::new()
    }

    fn params(&self) -> Option<&str>;

    /// Parameters that also have a flag of their own.
    fn param_flags(&self) -> Vec<(&'static str, Option<String>)> {
        Vec::new()
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model name (see `logimath list`)
    #[arg(long, conflicts_with = "compare")]
    pub model: Option<String>,
    /// Comma-separated models, one output column each
    #[arg(long)]
    pub compare: Option<String>,
    /// Parameters `k=v,...`
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// `start:end:count`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

impl CommandArgs for EvalArgs {
    const NAME: &'static str = "eval";
    const SETTINGS: &'static [&'static str] = &["model", "compare", "grid"];

    fn settings(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("model", self.model.clone()),
            ("compare", self.compare.clone()),
            ("grid", self.grid.clone()),
        ]
    }

    fn params(&self) -> Option<&str> {
        self.params.as_deref()
    }
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    /// Equation or check name (see `logimath list`); defaults to the
    /// model's own governing equation
    #[arg(long)]
    pub equation: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Pass threshold on the max residual
    #[arg(long)]
    pub tol: Option<String>,
    /// `analytic` or `fd`
    #[arg(long)]
    pub mode: Option<String>,
    /// Width of the excluded band around Z = 0 and Z = 1
    #[arg(long)]
    pub delta: Option<String>,
    /// Laguerre-heat initial data `poly:c0,c1,...`
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// Final time of a Laguerre-heat stack
    #[arg(long = "t")]
    pub t: Option<String>,
    #[arg(long)]
    pub dt: Option<String>,
    /// `exact` or `fd` slices for the transform checks
    #[arg(long)]
    pub source: Option<String>,
    /// Restrict transform residuals to `lo:hi`
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Comma-separated times for the Fisher check
    #[arg(long, allow_hyphen_values = true)]
    pub times: Option<String>,
    /// Residual of the as-printed Fisher profile instead (diagnostic)
    #[arg(long)]
    pub paper_literal: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    #[arg(long)]
    pub g0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub l0: Option<String>,
    #[arg(long = "lF", allow_hyphen_values = true)]
    pub l_f: Option<String>,
    #[arg(long)]
    pub tau_max: Option<String>,
    /// Grid points for the FEL field residual
    #[arg(long)]
    pub samples: Option<String>,
    /// Integrator tolerance for checks built on trajectories
    #[arg(long)]
    pub ode_tol: Option<String>,
}

impl CommandArgs for ResidualArgs {
    const NAME: &'static str = "residual";
    const SETTINGS: &'static [&'static str] = &[
        "equation",
        "model",
        "grid",
        "tol",
        "mode",
        "delta",
        "init",
        "t",
        "dt",
        "source",
        "window",
        "times",
        "paper-literal",
        "tau-max",
        "samples",
        "ode-tol",
    ];

    fn settings(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("equation", self.equation.clone()),
            ("model", self.model.clone()),
            ("grid", self.grid.clone()),
            ("tol", self.tol.clone()),
            ("mode", self.mode.clone()),
            ("delta", self.delta.clone()),
            ("init", self.init.clone()),
            ("t", self.t.clone()),
            ("dt", self.dt.clone()),
            ("source", self.source.clone()),
            ("window", self.window.clone()),
            ("times", self.times.clone()),
            ("tau-max", self.tau_max.clone()),
            ("samples", self.samples.clone()),
            ("ode-tol", self.ode_tol.clone()),
        ]
    }

    fn switches(&self) -> Vec<(&'static str, bool)> {
        vec![("paper-literal", self.paper_literal)]
    }

    fn params(&self) -> Option<&str> {
        self.params.as_deref()
    }

    fn param_flags(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("nu", self.nu.clone()),
            ("g0", self.g0.clone()),
            ("l0", self.l0.clone()),
            ("lF", self.l_f.clone()),
        ]
    }
}

#[derive(Debug, Args)]
pub struct OdeArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// `start:end`; the initial value is the closed form at `start`
    #[arg(long, allow_hyphen_values = true)]
    pub span: Option<String>,
    /// Integrator tolerance
    #[arg(long)]
    pub tol: Option<String>,
    /// Integrate the linear counterpart and map back
    #[arg(long)]
    pub linearized: bool,
    /// Output on this many uniform points (dense output) instead of the steps
    #[arg(long)]
    pub samples: Option<String>,
}

impl CommandArgs for OdeArgs {
    const NAME: &'static str = "ode";
    const SETTINGS: &'static [&'static str] = &["model", "span", "tol", "linearized", "samples"];

    fn settings(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("model", self.model.clone()),
            ("span", self.span.clone()),
            ("tol", self.tol.clone()),
            ("samples", self.samples.clone()),
        ]
    }

    fn switches(&self) -> Vec<(&'static str, bool)> {
        vec![("linearized", self.linearized)]
    }

    fn params(&self) -> Option<&str> {
        self.params.as_deref()
    }
}

#[derive(Debug, Args)]
pub struct PdeArgs {
    /// `laguerre-heat`, `hopf-cole` or `fisher`
    #[arg(long)]
    pub equation: Option<String>,
    /// Initial data `poly:c0,c1,...`
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// Final time
    #[arg(long = "t")]
    pub t: Option<String>,
    #[arg(long)]
    pub dt: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// `fd` (Crank–Nicolson), `exact` (exponential kernel) or `series`
    /// (Bessel-kernel operational series)
    #[arg(long)]
    pub method: Option<String>,
    /// Emit every n-th FD step as a `t,x,value` stack
    #[arg(long)]
    pub save_every: Option<String>,
    /// Comma-separated times for Fisher profiles
    #[arg(long, allow_hyphen_values = true)]
    pub times: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Fisher profile with the printed 1/k^2 prefactor and sign pairing
    #[arg(long)]
    pub paper_literal: bool,
}

impl CommandArgs for PdeArgs {
    const NAME: &'static str = "pde";
    const SETTINGS: &'static [&'static str] = &[
        "equation",
        "init",
        "t",
        "dt",
        "grid",
        "method",
        "save-every",
        "times",
        "paper-literal",
    ];

    fn settings(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("equation", self.equation.clone()),
            ("init", self.init.clone()),
            ("t", self.t.clone()),
            ("dt", self.dt.clone()),
            ("grid", self.grid.clone()),
            ("method", self.method.clone()),
            ("save-every", self.save_every.clone()),
            ("times", self.times.clone()),
        ]
    }

    fn switches(&self) -> Vec<(&'static str, bool)> {
        vec![("paper-literal", self.paper_literal)]
    }

    fn params(&self) -> Option<&str> {
        self.params.as_deref()
    }
}

#[derive(Debug, Args)]
pub struct FelArgs {
    /// Detuning
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// Small-signal gain
    #[arg(long)]
    pub g0: Option<String>,
    /// Initial field, real or `a+bi`
    #[arg(long, allow_hyphen_values = true)]
    pub l0: Option<String>,
    /// Saturation field, real or `a+bi`
    #[arg(long = "lF", allow_hyphen_values = true)]
    pub l_f: Option<String>,
    #[arg(long)]
    pub tau_max: Option<String>,
    /// Integrator tolerance (default 1e-10)
    #[arg(long)]
    pub tol: Option<String>,
    /// Output on this many uniform points instead of the steps
    #[arg(long)]
    pub samples: Option<String>,
}

impl CommandArgs for FelArgs {
    const NAME: &'static str = "fel";
    const SETTINGS: &'static [&'static str] = &["tau-max", "tol", "samples"];

    fn settings(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("tau-max", self.tau_max.clone()),
            ("tol", self.tol.clone()),
            ("samples", self.samples.clone()),
        ]
    }

    fn params(&self) -> Option<&str> {
        None
    }

    fn param_flags(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("nu", self.nu.clone()),
            ("g0", self.g0.clone()),
            ("l0", self.l0.clone()),
            ("lF", self.l_f.clone()),
        ]
    }
}
