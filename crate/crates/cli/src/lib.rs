//! Command-line front end of `logimath`.
//!
//! Data goes to `--output` or stdout; verdicts and summaries go to stdout,
//! or to stderr under `--stdout`; warnings and errors always go to stderr.
//! Exit codes: 0 success, 1 failed check or runtime error, 2 usage error.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod models;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use args::{Cli, Command};
use checks::CheckRegistry;
use commands::{build_config, Outcome};
use error::{CliError, CliResult};
use models::ModelRegistry;

/// A finished run and where its output belongs.
#[derive(Debug)]
pub struct Run {
    pub outcome: Outcome,
    pub output: Option<PathBuf>,
    /// Keep stdout for data only.
    pub data_only: bool,
}

pub fn run(cli: &Cli) -> CliResult<Run> {
    let models = ModelRegistry::builtin();
    let checks = CheckRegistry::builtin();
    let file = cli.config.as_deref();
    let (outcome, cfg) = match &cli.command {
        Command::Eval(a) => {
            let cfg = build_config(a, file)?;
            (commands::cmd_eval(&cfg, &models)?, Some(cfg))
        }
        Command::Residual(a) => {
            let cfg = build_config(a, file)?;
            (commands::cmd_residual(&cfg, &models, &checks)?, Some(cfg))
        }
        Command::Ode(a) => {
            let cfg = build_config(a, file)?;
            (commands::cmd_ode(&cfg, &models)?, Some(cfg))
        }
        Command::Pde(a) => {
            let cfg = build_config(a, file)?;
            (commands::cmd_pde(&cfg)?, Some(cfg))
        }
        Command::Fel(a) => {
            let cfg = build_config(a, file)?;
            (commands::cmd_fel(&cfg)?, Some(cfg))
        }
        Command::List => (commands::cmd_list(&models, &checks), None),
    };
    let output = cli
        .output
        .as_ref()
        .map(PathBuf::from)
        .or_else(|| cfg.as_ref().and_then(|c| c.output()));
    let data_only = cli.stdout || cfg.as_ref().map_or(Ok(false), |c| c.flag("stdout"))?;
    if data_only && output.is_some() {
        return Err(CliError::Usage(
            "--stdout and --output exclude each other".into(),
        ));
    }
    Ok(Run {
        outcome,
        output,
        data_only,
    })
}

/// Parses `args` (program name first) and runs; clap errors become usage
/// errors.
pub fn run_args<I, T>(args: I) -> CliResult<Run>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(&cli)
}

fn emit(run: &Run) -> CliResult<()> {
    let Run {
        outcome,
        output,
        data_only,
    } = run;
    match output {
        Some(path) => std::fs::write(path, &outcome.data).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.data.as_bytes());
            let _ = stdout.flush();
        }
    }
    // write errors (a closed pipe, say) are ignored rather than panicking
    let mut stderr = std::io::stderr().lock();
    for m in &outcome.messages {
        if *data_only {
            let _ = writeln!(stderr, "{m}");
        } else {
            let _ = writeln!(std::io::stdout().lock(), "{m}");
        }
    }
    for w in &outcome.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(())
}

/// Full program: parse, run, print; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli).and_then(|r| emit(&r).map(|_| r.outcome.exit_code())) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stdout_and_output_conflict() {
        let r = run_args(["logimath", "list"]).unwrap();
        assert!(r.outcome.data.contains("models:"));
        let e = run_args([
            "logimath", "--stdout", "-o", "x.csv", "eval", "--model", "cosh", "--params",
            "mu=1,r=1", "--grid", "0:1:2",
        ])
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn clap_errors_are_usage() {
        let e = run_args(["logimath", "eval", "--bogus"]).unwrap_err();
        assert!(matches!(e, CliError::Usage(_)));
    }
}
