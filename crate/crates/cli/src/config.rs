//! Run configuration: `key = value` files, `--params` lists and flags.
//!
//! Config files hold one `key = value` per line; `#` starts a comment.
//! The first line may instead be a bare model name (`variant = name` is
//! accepted too), which is the same as `model = name`.
//! Keys naming a setting of the subcommand (`grid`, `tol`, ...) set it;
//! every other key is a model or check parameter, exactly as if it had been
//! given in `--params`. Flags override the file. A parameter that nothing
//! consumes is reported as an unknown key with its line and column.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::str::FromStr;

use logimath::Grid;

use crate::error::{CliError, CliResult, Origin};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const TOL_ENV: &str = "LOGIMATH_DEFAULT_TOL";

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub origin: Origin,
}

impl Entry {
    pub fn new(value: impl Into<String>, origin: Origin) -> Self {
        Entry {
            value: value.into(),
            origin,
        }
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        self.value
            .parse::<f64>()
            .ok()
            .filter(|v| !v.is_nan())
            .ok_or_else(|| {
                CliError::parse(
                    &self.origin,
                    format!("{key}: '{}' is not a number", self.value),
                )
            })
    }
}

fn column(text: &str, byte: usize) -> usize {
    text[..byte].chars().count() + 1
}

/// Splits `k1=v1,k2=v2` with the column of each key.
pub fn parse_params(text: &str) -> CliResult<Vec<(String, Entry)>> {
    let mut out = Vec::new();
    let mut start = 0;
    for item in text.split(',') {
        let lead = item.len() - item.trim_start().len();
        let origin = Origin::Params {
            column: column(text, start + lead),
        };
        let Some((key, value)) = item.split_once('=') else {
            return Err(CliError::parse(
                &origin,
                format!("expected key=value, found '{}'", item.trim()),
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::parse(
                &origin,
                format!("empty key or value in '{}'", item.trim()),
            ));
        }
        out.push((key.to_string(), Entry::new(value, origin)));
        start += item.len() + 1;
    }
    Ok(out)
}

/// Parses a config file body; `path` is only used in error locations.
pub fn parse_config(path: &str, text: &str) -> CliResult<Vec<(String, Entry)>> {
    let mut out: Vec<(String, Entry)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let at = |byte: usize| Origin::File {
            path: path.to_string(),
            line: i + 1,
            column: column(raw, byte),
        };
        let lead = line.len() - line.trim_start().len();
        let Some(eq) = line.find('=') else {
            // a bare first line names the model variant
            let word = line.trim();
            if out.is_empty() && !word.contains(char::is_whitespace) {
                out.push(("model".into(), Entry::new(word, at(lead))));
                continue;
            }
            return Err(CliError::parse(&at(lead), "expected 'key = value'"));
        };
        let key = match line[..eq].trim() {
            "variant" => "model",
            k => k,
        };
        if key.is_empty() {
            return Err(CliError::parse(&at(eq), "missing key before '='"));
        }
        if key.contains(char::is_whitespace) {
            return Err(CliError::parse(
                &at(lead),
                format!("key '{key}' contains whitespace"),
            ));
        }
        let value = line[eq + 1..].trim();
        if value.is_empty() {
            return Err(CliError::parse(
                &at(eq + 1),
                format!("missing value for '{key}'"),
            ));
        }
        if let Some((_, first)) = out.iter().find(|(k, _)| k == key) {
            return Err(CliError::parse(
                &at(lead),
                format!("duplicate key '{key}' (first set at {})", first.origin),
            ));
        }
        out.push((key.to_string(), Entry::new(value, at(lead))));
    }
    Ok(out)
}

/// Resolved settings and parameters of one invocation.
#[derive(Debug)]
pub struct RunConfig {
    pub command: &'static str,
    settings: BTreeMap<String, Entry>,
    params: BTreeMap<String, Entry>,
    consumed: RefCell<BTreeSet<String>>,
    default_tol: f64,
}

impl RunConfig {
    pub fn new(command: &'static str, default_tol: f64) -> Self {
        RunConfig {
            command,
            settings: BTreeMap::new(),
            params: BTreeMap::new(),
            consumed: RefCell::new(BTreeSet::new()),
            default_tol,
        }
    }

    /// Default tolerance from the environment variable, if set.
    pub fn env_tolerance() -> CliResult<f64> {
        match std::env::var(TOL_ENV) {
            Ok(v) => {
                let tol = Entry::new(v, Origin::Env(TOL_ENV)).f64(TOL_ENV)?;
                if tol > 0.0 {
                    Ok(tol)
                } else {
                    Err(CliError::parse(
                        &Origin::Env(TOL_ENV),
                        "tolerance must be positive",
                    ))
                }
            }
            Err(_) => Ok(DEFAULT_TOL),
        }
    }

    /// Adds config-file entries; keys in `setting_keys` become settings.
    pub fn load_file(&mut self, entries: Vec<(String, Entry)>, setting_keys: &[&str]) {
        for (key, entry) in entries {
            if setting_keys.contains(&key.as_str()) {
                self.settings.insert(key, entry);
            } else {
                self.params.insert(key, entry);
            }
        }
    }

    /// A flag value; replaces any value from a file.
    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.settings.insert(
                key.to_string(),
                Entry::new(v, Origin::Flag(key.to_string())),
            );
        }
    }

    pub fn set_flag(&mut self, key: &str, on: bool) {
        if on {
            self.set(key, Some("true".into()));
        }
    }

    /// Command-line parameters: replace file values, but may not repeat
    /// among themselves.
    pub fn add_cli_params(&mut self, entries: Vec<(String, Entry)>) -> CliResult<()> {
        let mut seen = BTreeSet::new();
        for (key, entry) in entries {
            if !seen.insert(key.clone()) {
                return Err(CliError::parse(
                    &entry.origin,
                    format!("parameter '{key}' given twice"),
                ));
            }
            self.params.insert(key, entry);
        }
        Ok(())
    }

    pub fn setting(&self, key: &str) -> Option<&Entry> {
        self.settings.get(key)
    }

    pub fn require(&self, key: &str) -> CliResult<&Entry> {
        self.setting(key)
            .ok_or_else(|| CliError::Usage(format!("{}: missing --{key}", self.command)))
    }

    pub fn f64_setting(&self, key: &str) -> CliResult<Option<f64>> {
        self.setting(key).map(|e| e.f64(key)).transpose()
    }

    pub fn usize_setting(&self, key: &str) -> CliResult<Option<usize>> {
        self.setting(key)
            .map(|e| {
                e.value.parse::<usize>().map_err(|_| {
                    CliError::parse(&e.origin, format!("{key}: '{}' is not a count", e.value))
                })
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        match self.setting(key) {
            None => Ok(false),
            Some(e) => match e.value.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => Err(CliError::parse(
                    &e.origin,
                    format!("{key}: expected true or false, found '{other}'"),
                )),
            },
        }
    }

    /// `--tol`, else the environment default, else 1e-6.
    pub fn tol(&self) -> CliResult<f64> {
        match self.f64_setting("tol")? {
            Some(t) if t > 0.0 => Ok(t),
            Some(_) => Err(CliError::parse(
                &self.settings["tol"].origin,
                "tol must be positive",
            )),
            None => Ok(self.default_tol),
        }
    }

    pub fn grid(&self, key: &str) -> CliResult<Grid> {
        let e = self.require(key)?;
        Grid::from_str(&e.value).map_err(|err| CliError::parse(&e.origin, err.to_string()))
    }

    /// `a:b` pair.
    pub fn range(&self, key: &str) -> CliResult<Option<(f64, f64)>> {
        let Some(e) = self.setting(key) else {
            return Ok(None);
        };
        let bad = || {
            CliError::parse(
                &e.origin,
                format!("{key}: expected start:end, found '{}'", e.value),
            )
        };
        let (a, b) = e.value.split_once(':').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        if !(b > a) {
            return Err(CliError::parse(
                &e.origin,
                format!("{key}: end must exceed start"),
            ));
        }
        Ok(Some((a, b)))
    }

    /// Comma-separated numbers.
    pub fn list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        let Some(e) = self.setting(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    CliError::parse(&e.origin, format!("{key}: '{}' is not a number", s.trim()))
                })
            })
            .collect::<CliResult<Vec<f64>>>()
            .map(Some)
    }

    pub fn output(&self) -> Option<PathBuf> {
        self.setting("output").map(|e| PathBuf::from(&e.value))
    }

    pub fn has_param(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    /// A parameter entry, marking it as used.
    pub fn param_entry(&self, key: &str) -> Option<&Entry> {
        let e = self.params.get(key)?;
        self.consumed.borrow_mut().insert(key.to_string());
        Some(e)
    }

    pub fn param(&self, key: &str) -> CliResult<Option<f64>> {
        self.param_entry(key).map(|e| e.f64(key)).transpose()
    }

    /// The first of `keys` present.
    pub fn param_any(&self, keys: &[&str]) -> CliResult<Option<f64>> {
        for k in keys {
            if let Some(v) = self.param(k)? {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }

    pub fn require_param(&self, keys: &[&str], context: &str) -> CliResult<f64> {
        self.param_any(keys)?.ok_or_else(|| {
            CliError::Usage(format!(
                "{context}: missing parameter {}",
                keys.join(" or ")
            ))
        })
    }

    pub fn param_or(&self, key: &str, default: f64) -> CliResult<f64> {
        Ok(self.param(key)?.unwrap_or(default))
    }

    /// Fails on the first parameter nobody asked for.
    pub fn ensure_consumed(&self, context: &str) -> CliResult<()> {
        let used = self.consumed.borrow();
        match self.params.iter().find(|(k, _)| !used.contains(*k)) {
            Some((k, e)) => Err(CliError::parse(
                &e.origin,
                format!("unknown key '{k}' for {context}"),
            )),
            None => Ok(()),
        }
    }
}
