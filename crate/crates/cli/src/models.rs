//! Model specifications: a name, its parameter keys and a builder.
//!
//! Normalized families take `mu` directly, or `K` with `a` (alias `f0`), in
//! which case `mu = K/a − 1` and values are reported as `K·Z`, so that the
//! curve starts at `a` and saturates at `K` like the classical one.

use logimath::logistic::{LogisticModel, RateFn, TricomiNormalization, VariableRate};

use crate::config::RunConfig;
use crate::error::CliResult;

/// A model together with the factor applied to its values on output.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub name: &'static str,
    pub model: LogisticModel,
    pub scale: f64,
}

pub trait ModelSpec: Send + Sync {
    fn name(&self) -> &'static str;

    /// Parameter keys, for listings.
    fn keys(&self) -> &'static str;

    fn build(&self, cfg: &RunConfig) -> CliResult<BuiltModel>;
}

/// `mu` or the `(a, K)` pair, and the output scale.
fn mu_and_scale(cfg: &RunConfig, context: &str) -> CliResult<(f64, f64)> {
    if let Some(mu) = cfg.param("mu")? {
        return Ok((mu, 1.0));
    }
    if let Some(k) = cfg.param("K")? {
        let a = cfg.require_param(&["a", "f0"], context)?;
        return Ok((k / a - 1.0, k));
    }
    cfg.require_param(&["mu"], context).map(|mu| (mu, 1.0))
}

fn built(name: &'static str, model: LogisticModel, scale: f64) -> BuiltModel {
    BuiltModel { name, model, scale }
}

struct Classical;

impl ModelSpec for Classical {
    fn name(&self) -> &'static str {
        "classical"
    }

    fn keys(&self) -> &'static str {
        "f0|a, r|lambda, K"
    }

    fn build(&self, cfg: &RunConfig) -> CliResult<BuiltModel> {
        let f0 = cfg.require_param(&["f0", "a"], self.name())?;
        let r = cfg.require_param(&["r", "lambda"], self.name())?;
        let k = cfg.require_param(&["K"], self.name())?;
        Ok(built(self.name(), LogisticModel::classical(f0, r, k)?, 1.0))
    }
}

struct Normalized;

impl ModelSpec for Normalized {
    fn name(&self) -> &'static str {
        "normalized"
    }

    fn keys(&self) -> &'static str {
        "mu | (K, a), r|lambda"
    }

    fn build(&self, cfg: &RunConfig) -> CliResult<BuiltModel> {
        let (mu, scale) = mu_and_scale(cfg, self.name())?;
        let r = cfg.require_param(&["r", "lambda"], self.name())?;
        Ok(built(self.name(), LogisticModel::normalized(mu, r)?, scale))
    }
}

struct TwoExponential;

impl ModelSpec for TwoExponential {
    fn name(&self) -> &'static str {
        "two-exponential"
    }

    fn keys(&self) -> &'static str {
        "mu | (K, a), r1, r2, c1 = 1, c2 = 1"
    }

    fn build(&self, cfg: &RunConfig) -> CliResult<BuiltModel> {
        let (mu, scale) = mu_and_scale(cfg, self.name())?;
        let r1 = cfg.require_param(&["r1"], self.name())?;
        let r2 = cfg.require_param(&["r2"], self.name())?;
        let c1 = cfg.param_or("c1", 1.0)?;
        let c2 = cfg.param_or("c2", 1.0)?;
        let model = LogisticModel::two_exponential(mu, c1, r1, c2, r2)?;
        Ok(built(self.name(), model, scale))
    }
}

struct Richards;

impl ModelSpec for Richards {
    fn name(&self) -> &'static str {
        "richards"
    }

    fn keys(&self) -> &'static str {
        "mu | (K, a), r|lambda, n"
    }

    fn build(&self, cfg: &RunConfig) -> CliResult<BuiltModel> {
        let (mu, scale) = mu_and_scale(cfg, self.name())?;
        let r = cfg.require_param(&["r", "lambda"], self.name())?;
        let n = cfg.require_param(&["n"], self.name())?;
        Ok(built(
            self.name(),
            LogisticModel::richards(mu, r, n)?,
            scale,
        ))
    }
}

struct Forestry;

impl ModelSpec for Forestry {
    fn name(&self) -> &'static str {
        "forestry"
    }

    fn keys(&self) -> &'static str {
        "alpha, lambda, chi, eta, k, n"
    }

    fn build(&self, cfg: &RunConfig) -> CliResult<BuiltModel> {
        let get = |k: &str| cfg.require_param(&[k], self.name());
        let model = LogisticModel::forestry(
            get("alpha")?,
            get("lambda")?,
            get("chi")?,
            get("eta")?,
            get("k")?,
            get("n")?,
        )?;
        Ok(built(self.name(), model, 1.0))
    }
}

struct Cosh;

impl ModelSpec for Cosh {
    fn name(&self) -> &'static str {
        "cosh"
    }

    fn keys(&self) -> &'static str {
        "mu | (K, a), r|lambda"
    }

    fn build(&self, cfg: &RunConfig) -> CliResult<BuiltModel> {
        let (mu, scale) = mu_and_scale(cfg, self.name())?;
        let r = cfg.require_param(&["r", "lambda"], self.name())?;
        Ok(built(self.name(), LogisticModel::cosh_lc(mu, r)?, scale))
    }
}

/// Laguerre logistic; `order` is `None` for the ν = 0 form.
struct Laguerre {
    name: &'static str,
    order: Option<TricomiNormalization>,
}

impl ModelSpec for Laguerre {
    fn name(&self) -> &'static str {
        self.name
    }

    fn keys(&self) -> &'static str {
        match self.order {
            None => "mu | (K, a), lambda|r",
            Some(_) => "mu | (K, a), lambda|r, nu",
        }
    }

    fn build(&self, cfg: &RunConfig) -> CliResult<BuiltModel> {
        let (mu, scale) = mu_and_scale(cfg, self.name)?;
        let lambda = cfg.require_param(&["lambda", "r"], self.name)?;
        let (nu, norm) = match self.order {
            None => (0.0, TricomiNormalization::Raw),
            Some(norm) => (cfg.require_param(&["nu"], self.name)?, norm),
        };
        Ok(built(
            self.name,
            LogisticModel::laguerre(mu, lambda, nu, norm)?,
            scale,
        ))
    }
}

/// Rates linear in x: `r(x) = r + r1 x`, `k(x) = k + k1 x`.
struct VariableRateSpec;

impl ModelSpec for VariableRateSpec {
    fn name(&self) -> &'static str {
        "variable-rate"
    }

    fn keys(&self) -> &'static str {
        "f0|a, r, k, r1 = 0, k1 = 0"
    }

    fn build(&self, cfg: &RunConfig) -> CliResult<BuiltModel> {
        let f0 = cfg.require_param(&["f0", "a"], self.name())?;
        let (r0, k0) = (
            cfg.require_param(&["r"], self.name())?,
            cfg.require_param(&["k"], self.name())?,
        );
        let (r1, k1) = (cfg.param_or("r1", 0.0)?, cfg.param_or("k1", 0.0)?);
        let rate = RateFn::new(move |x| r0 + r1 * x);
        let loss = RateFn::new(move |x| k0 + k1 * x);
        let model = LogisticModel::VariableRate(VariableRate::new(rate, loss, f0)?);
        Ok(built(self.name(), model, 1.0))
    }
}

/// Model specifications by name.
pub struct ModelRegistry {
    specs: Vec<Box<dyn ModelSpec>>,
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl ModelRegistry {
    pub fn builtin() -> Self {
        let specs: Vec<Box<dyn ModelSpec>> = vec![
            Box::new(Classical),
            Box::new(Normalized),
            Box::new(TwoExponential),
            Box::new(Richards),
            Box::new(Forestry),
            Box::new(Cosh),
            Box::new(Laguerre {
                name: "laguerre",
                order: None,
            }),
            Box::new(Laguerre {
                name: "laguerre-nu",
                order: Some(TricomiNormalization::Gamma),
            }),
            Box::new(Laguerre {
                name: "laguerre-nu-raw",
                order: Some(TricomiNormalization::Raw),
            }),
            Box::new(VariableRateSpec),
        ];
        ModelRegistry { specs }
    }

    pub fn get(&self, name: &str) -> Option<&dyn ModelSpec> {
        self.specs
            .iter()
            .find(|s| s.name() == name)
            .map(|b| b.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn ModelSpec> {
        self.specs.iter().map(|b| b.as_ref())
    }

    pub fn build(&self, name: &str, cfg: &RunConfig) -> CliResult<BuiltModel> {
        let spec = self.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.iter().map(|s| s.name()).collect();
            crate::error::CliError::Usage(format!(
                "unknown model '{name}' (known: {})",
                known.join(", ")
            ))
        })?;
        spec.build(cfg)
    }
}
