//! Governing equations of the logistic families, as named strategies.
//!
//! Each equation is a [`GoverningEquation`] trait object registered by name
//! in an [`EquationRegistry`]; callers pick one at runtime (the CLI's
//! `--equation` flag) or let the registry pick the default for a model.

use crate::error::{Error, Result};
use crate::residual::{assemble_report, DerivativeMode, Grid, ReportMeta, ResidualReport};
use crate::special_fn::SeriesPolicy;

use super::{two_exp_delta, Jet, LogisticModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationOrder {
    First,
    Second,
    /// Second order through the Laguerre derivative.
    Laguerre,
}

/// Which end of `0 < Z < 1` makes a logarithmic-derivative coefficient blow up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularBand {
    None,
    /// `d/dx ln Z` appears: keep `Z ≥ δ`.
    Lower,
    /// `d/dx ln(1 − Z)` appears: keep `Z ≤ 1 − δ`.
    Upper,
}

pub trait GoverningEquation: Send + Sync {
    fn name(&self) -> &'static str;

    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    fn description(&self) -> &'static str;

    fn order(&self) -> EquationOrder;

    fn singular_band(&self) -> SingularBand {
        SingularBand::None
    }

    fn accepts(&self, model: &LogisticModel) -> bool;

    /// LHS − RHS at `x` for the candidate described by `jet`.
    fn residual(&self, model: &LogisticModel, x: f64, jet: &Jet) -> Result<f64>;
}

/// `F' = r (1 − F/K) F`, and `F' = r(x) F − k(x) F²` for variable rates.
struct Canonical;

impl GoverningEquation for Canonical {
    fn name(&self) -> &'static str {
        "canonical"
    }

    fn description(&self) -> &'static str {
        "F' = r (1 - F/K) F"
    }

    fn order(&self) -> EquationOrder {
        EquationOrder::First
    }

    fn accepts(&self, model: &LogisticModel) -> bool {
        matches!(
            model,
            LogisticModel::Classical { .. }
                | LogisticModel::Normalized { .. }
                | LogisticModel::VariableRate(_)
        )
    }

    fn residual(&self, model: &LogisticModel, x: f64, jet: &Jet) -> Result<f64> {
        let f = jet.value;
        let rhs = match model {
            LogisticModel::Classical { r, capacity, .. } => r * (1.0 - f / capacity) * f,
            LogisticModel::Normalized { r, .. } => r * (1.0 - f) * f,
            LogisticModel::VariableRate(v) => v.rate.at(x) * f - v.loss.at(x) * f * f,
            _ => unreachable!("accepts() filters models"),
        };
        Ok(jet.d1 - rhs)
    }
}

/// `Z' = r1 [1 − (1 + Δ e^{−r2 x}) Z] Z` with `Δ = −μ c2 (r2 − r1)/r1`.
struct ExponentialCapacity {
    delta_override: Option<f64>,
}

impl GoverningEquation for ExponentialCapacity {
    fn name(&self) -> &'static str {
        "two-exponential"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["exponential-capacity"]
    }

    fn description(&self) -> &'static str {
        "Z' = r1 [1 - (1 + D e^{-r2 x}) Z] Z, D = -mu c2 (r2 - r1)/r1"
    }

    fn order(&self) -> EquationOrder {
        EquationOrder::First
    }

    fn accepts(&self, model: &LogisticModel) -> bool {
        matches!(model, LogisticModel::TwoExponential { .. })
    }

    fn residual(&self, model: &LogisticModel, x: f64, jet: &Jet) -> Result<f64> {
        let LogisticModel::TwoExponential { mu, c2, r1, r2, .. } = model else {
            unreachable!("accepts() filters models")
        };
        let delta = match self.delta_override {
            Some(d) => d,
            None => two_exp_delta(mu * c2, *r1, *r2)?,
        };
        let z = jet.value;
        Ok(jet.d1 - r1 * (1.0 - (1.0 + delta * (-r2 * x).exp()) * z) * z)
    }
}

/// `Z' = r (1 − Zⁿ) Z`.
struct RichardsGrowth;

impl GoverningEquation for RichardsGrowth {
    fn name(&self) -> &'static str {
        "richards"
    }

    fn description(&self) -> &'static str {
        "Z' = r (1 - Z^n) Z"
    }

    fn order(&self) -> EquationOrder {
        EquationOrder::First
    }

    fn accepts(&self, model: &LogisticModel) -> bool {
        matches!(model, LogisticModel::Richards { .. })
    }

    fn residual(&self, model: &LogisticModel, _x: f64, jet: &Jet) -> Result<f64> {
        let LogisticModel::Richards { r, n, .. } = model else {
            unreachable!("accepts() filters models")
        };
        let z = jet.value;
        Ok(jet.d1 - r * (1.0 - z.powf(*n)) * z)
    }
}

/// `σ' = k/(nλ) [λ − χ (σ − α)ⁿ] (σ − α)`.
struct ForestryGrowth;

impl GoverningEquation for ForestryGrowth {
    fn name(&self) -> &'static str {
        "forestry"
    }

    fn description(&self) -> &'static str {
        "s' = k/(n lambda) [lambda - chi (s - alpha)^n] (s - alpha)"
    }

    fn order(&self) -> EquationOrder {
        EquationOrder::First
    }

    fn accepts(&self, model: &LogisticModel) -> bool {
        matches!(model, LogisticModel::Forestry { .. })
    }

    fn residual(&self, model: &LogisticModel, _x: f64, jet: &Jet) -> Result<f64> {
        let LogisticModel::Forestry {
            alpha,
            lambda,
            chi,
            k,
            n,
            ..
        } = model
        else {
            unreachable!("accepts() filters models")
        };
        let y = jet.value - alpha;
        let yn = if y < 0.0 { -(-y).powf(*n) } else { y.powf(*n) };
        Ok(jet.d1 - k / (n * lambda) * (lambda - chi * yn) * y)
    }
}

/// `Z'' − 2 (ln Z)' Z' = −r² (1 − Z) Z` for the cosh characteristic.
struct CoshDamped;

impl GoverningEquation for CoshDamped {
    fn name(&self) -> &'static str {
        "cosh-damped"
    }

    fn description(&self) -> &'static str {
        "Z'' - 2 (ln Z)' Z' = -r^2 (1 - Z) Z"
    }

    fn order(&self) -> EquationOrder {
        EquationOrder::Second
    }

    fn singular_band(&self) -> SingularBand {
        SingularBand::Lower
    }

    fn accepts(&self, model: &LogisticModel) -> bool {
        matches!(model, LogisticModel::CoshLc { .. })
    }

    fn residual(&self, model: &LogisticModel, _x: f64, jet: &Jet) -> Result<f64> {
        let LogisticModel::CoshLc { r, .. } = model else {
            unreachable!("accepts() filters models")
        };
        let z = jet.value;
        let log_d = jet.d1 / z;
        Ok(jet.d2()? - 2.0 * log_d * jet.d1 + r * r * (1.0 - z) * z)
    }
}

/// `Z'' + (r1 + r2) Z' − 2 (ln Z)' Z' = s · r1 r2 (1 − Z) Z`.
///
/// The characteristic `c1 e^{−r1 x} + c2 e^{−r2 x}` has eigenvalue `−r1 r2`
/// under `d² + (r1 + r2) d`, which forces `s = +1`. The form with `s = −1`
/// is kept as a separate entry so that it can be checked and reported.
struct DoubleExponential {
    sign: f64,
}

impl GoverningEquation for DoubleExponential {
    fn name(&self) -> &'static str {
        if self.sign > 0.0 {
            "double-exponential"
        } else {
            "double-exponential-as-printed"
        }
    }

    fn description(&self) -> &'static str {
        if self.sign > 0.0 {
            "Z'' + (r1 + r2) Z' - 2 (ln Z)' Z' = r1 r2 (1 - Z) Z"
        } else {
            "Z'' + (r1 + r2) Z' - 2 (ln Z)' Z' = -r1 r2 (1 - Z) Z (sign as commonly printed; does not hold)"
        }
    }

    fn order(&self) -> EquationOrder {
        EquationOrder::Second
    }

    fn singular_band(&self) -> SingularBand {
        SingularBand::Lower
    }

    fn accepts(&self, model: &LogisticModel) -> bool {
        matches!(model, LogisticModel::TwoExponential { .. })
    }

    fn residual(&self, model: &LogisticModel, _x: f64, jet: &Jet) -> Result<f64> {
        let LogisticModel::TwoExponential { r1, r2, .. } = model else {
            unreachable!("accepts() filters models")
        };
        let z = jet.value;
        let log_d = jet.d1 / z;
        Ok(jet.d2()? + (r1 + r2) * jet.d1
            - 2.0 * log_d * jet.d1
            - self.sign * r1 * r2 * (1.0 - z) * z)
    }
}

/// `L_ν Z + f(Z, x) Z' = λ Z (1 − Z)` with `f = −2x d/dx ln(1 − Z)`.
struct LaguerreLogisticEquation {
    any_order: bool,
}

impl GoverningEquation for LaguerreLogisticEquation {
    fn name(&self) -> &'static str {
        if self.any_order {
            "laguerre-logistic-nu"
        } else {
            "laguerre-logistic"
        }
    }

    fn aliases(&self) -> &'static [&'static str] {
        if self.any_order {
            &["theorem-3.2"]
        } else {
            &["theorem-3.1"]
        }
    }

    fn description(&self) -> &'static str {
        if self.any_order {
            "(d/dx x d/dx + nu d/dx) Z - 2x (ln(1 - Z))' Z' = lambda Z (1 - Z)"
        } else {
            "d/dx x d/dx Z - 2x (ln(1 - Z))' Z' = lambda Z (1 - Z)"
        }
    }

    fn order(&self) -> EquationOrder {
        EquationOrder::Laguerre
    }

    fn singular_band(&self) -> SingularBand {
        SingularBand::Upper
    }

    fn accepts(&self, model: &LogisticModel) -> bool {
        match model {
            LogisticModel::LaguerreLogistic { nu, .. } => self.any_order || *nu == 0.0,
            _ => false,
        }
    }

    fn residual(&self, model: &LogisticModel, x: f64, jet: &Jet) -> Result<f64> {
        let LogisticModel::LaguerreLogistic { lambda, nu, .. } = model else {
            unreachable!("accepts() filters models")
        };
        let z = jet.value;
        let laguerre = (1.0 + nu) * jet.d1 + x * jet.d2()?;
        // −2x d/dx ln(1 − Z) = 2x Z' / (1 − Z)
        let coupling = 2.0 * x * jet.d1 / (1.0 - z);
        Ok(laguerre + coupling * jet.d1 - lambda * z * (1.0 - z))
    }
}

/// Options for a residual run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualOptions {
    pub mode: DerivativeMode,
    /// Defaults to 1e-8 (analytic) or 1e-5 (finite differences).
    pub tol: Option<f64>,
    /// Width of the excluded band around Z ∈ {0, 1}.
    pub delta: f64,
    pub policy: SeriesPolicy,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        ResidualOptions {
            mode: DerivativeMode::Analytic,
            tol: None,
            delta: 1e-6,
            policy: SeriesPolicy::default(),
        }
    }
}

impl ResidualOptions {
    pub fn finite_difference() -> Self {
        ResidualOptions {
            mode: DerivativeMode::FiniteDifference,
            ..Default::default()
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(match self.mode {
            DerivativeMode::Analytic => 1e-8,
            DerivativeMode::FiniteDifference => 1e-5,
        })
    }
}

/// Name-indexed collection of governing equations.
pub struct EquationRegistry {
    entries: Vec<Box<dyn GoverningEquation>>,
}

impl Default for EquationRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl EquationRegistry {
    pub fn empty() -> Self {
        EquationRegistry {
            entries: Vec::new(),
        }
    }

    /// All equations of the logistic catalogue.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(Canonical));
        reg.register(Box::new(ExponentialCapacity {
            delta_override: None,
        }));
        reg.register(Box::new(RichardsGrowth));
        reg.register(Box::new(ForestryGrowth));
        reg.register(Box::new(CoshDamped));
        reg.register(Box::new(DoubleExponential { sign: 1.0 }));
        reg.register(Box::new(DoubleExponential { sign: -1.0 }));
        reg.register(Box::new(LaguerreLogisticEquation { any_order: false }));
        reg.register(Box::new(LaguerreLogisticEquation { any_order: true }));
        reg
    }

    /// Adds an equation; a later entry with the same name shadows earlier ones.
    pub fn register(&mut self, eq: Box<dyn GoverningEquation>) {
        self.entries.retain(|e| e.name() != eq.name());
        self.entries.push(eq);
    }

    pub fn get(&self, name: &str) -> Option<&dyn GoverningEquation> {
        self.entries
            .iter()
            .find(|e| e.name() == name || e.aliases().contains(&name))
            .map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn GoverningEquation> {
        self.entries.iter().map(|b| b.as_ref())
    }

    /// The first registered equation that accepts the model.
    pub fn default_for(&self, model: &LogisticModel) -> Option<&dyn GoverningEquation> {
        self.iter().find(|e| e.accepts(model))
    }

    pub fn check(
        &self,
        name: &str,
        model: &LogisticModel,
        grid: &Grid,
        opts: &ResidualOptions,
    ) -> Result<ResidualReport> {
        let eq = self
            .get(name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown equation '{name}'")))?;
        residual_report(eq, model, grid, opts)
    }
}

/// Residual of one equation for one model over a grid.
pub fn residual_report(
    eq: &dyn GoverningEquation,
    model: &LogisticModel,
    grid: &Grid,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    if !eq.accepts(model) {
        return Err(Error::Unsupported(format!(
            "equation '{}' does not apply to the {} family",
            eq.name(),
            model.kind()
        )));
    }
    let mut residuals = Vec::with_capacity(grid.len());
    for x in grid.iter() {
        let jet = match opts.mode {
            DerivativeMode::Analytic => model.jet(x, &opts.policy)?,
            DerivativeMode::FiniteDifference => model.numeric_jet(x, &opts.policy)?,
        };
        let (lower, upper) = (opts.delta, 1.0 - opts.delta);
        let violated = match eq.singular_band() {
            SingularBand::None => false,
            SingularBand::Lower => jet.value < lower,
            SingularBand::Upper => jet.value > upper,
        };
        if violated {
            return Err(Error::SingularGrid {
                x,
                value: jet.value,
                lower,
                upper,
            });
        }
        residuals.push(eq.residual(model, x, &jet)?);
    }
    let meta = ReportMeta::new(model.label(), eq.name(), opts.mode);
    Ok(assemble_report(residuals, opts.tolerance(), meta)?.with_abscissa(grid.points().to_vec()))
}

/// Residual of the model's default governing equation with analytic
/// derivatives and the default tolerance.
pub fn governing_residual(
    model: &LogisticModel,
    grid: &Grid,
    policy: &SeriesPolicy,
) -> Result<ResidualReport> {
    let registry = EquationRegistry::builtin();
    let eq = registry
        .default_for(model)
        .ok_or_else(|| Error::Unsupported(format!("no governing equation for {}", model.kind())))?;
    let opts = ResidualOptions {
        policy: *policy,
        ..Default::default()
    };
    residual_report(eq, model, grid, &opts)
}

/// Exponential-capacity residual with a caller-chosen Δ.
pub fn residual_with_delta(
    model: &LogisticModel,
    grid: &Grid,
    delta: f64,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    residual_report(
        &ExponentialCapacity {
            delta_override: Some(delta),
        },
        model,
        grid,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logistic::TricomiNormalization;

    #[test]
    fn registry_lookup_by_alias() {
        let reg = EquationRegistry::builtin();
        assert_eq!(reg.get("theorem-3.1").unwrap().name(), "laguerre-logistic");
        assert_eq!(
            reg.get("theorem-3.2").unwrap().name(),
            "laguerre-logistic-nu"
        );
        assert!(reg.get("nope").is_none());
        assert!(reg.names().contains(&"canonical"));
    }

    #[test]
    fn default_equations() {
        let reg = EquationRegistry::builtin();
        let m = LogisticModel::two_exponential(1.0, 1.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!(reg.default_for(&m).unwrap().name(), "two-exponential");
        let l = LogisticModel::laguerre(1.0, 1.0, 2.0, TricomiNormalization::Raw).unwrap();
        assert_eq!(reg.default_for(&l).unwrap().name(), "laguerre-logistic-nu");
    }

    #[test]
    fn normalized_canonical_closure() {
        let m = LogisticModel::normalized(99.0, 1.0).unwrap();
        let g = Grid::uniform(-5.0, 10.0, 64).unwrap();
        let r = governing_residual(&m, &g, &SeriesPolicy::default()).unwrap();
        assert!(r.max_norm <= 1e-8, "{}", r.max_norm);
    }

    #[test]
    fn cosh_closure_both_modes() {
        let m = LogisticModel::cosh_lc(1.0, 1.0).unwrap();
        let g = Grid::uniform(-3.0, 3.0, 61).unwrap();
        let reg = EquationRegistry::builtin();
        let a = reg
            .check("cosh-damped", &m, &g, &ResidualOptions::default())
            .unwrap();
        assert!(a.passed(), "{}", a.max_norm);
        let opts = ResidualOptions {
            tol: Some(1e-6),
            ..ResidualOptions::finite_difference()
        };
        let f = reg.check("cosh-damped", &m, &g, &opts).unwrap();
        assert!(f.passed(), "{}", f.max_norm);
    }

    #[test]
    fn laguerre_theorem_fd() {
        let m = LogisticModel::laguerre(1.0, 1.0, 0.0, TricomiNormalization::Raw).unwrap();
        let g = Grid::uniform(0.5, 6.0, 64).unwrap();
        let reg = EquationRegistry::builtin();
        let r = reg
            .check("theorem-3.1", &m, &g, &ResidualOptions::finite_difference())
            .unwrap();
        assert!(r.passed(), "{}", r.max_norm);
    }

    #[test]
    fn theorem_3_1_needs_order_zero() {
        let m = LogisticModel::laguerre(1.0, 1.0, 1.0, TricomiNormalization::Raw).unwrap();
        let g = Grid::uniform(0.5, 6.0, 8).unwrap();
        let reg = EquationRegistry::builtin();
        assert!(matches!(
            reg.check("theorem-3.1", &m, &g, &ResidualOptions::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn singular_band_is_enforced() {
        // Z → 1 quickly for large λ; the coupling term blows up
        let m = LogisticModel::laguerre(1e-3, 5.0, 0.0, TricomiNormalization::Raw).unwrap();
        let g = Grid::uniform(0.5, 10.0, 16).unwrap();
        let reg = EquationRegistry::builtin();
        assert!(matches!(
            reg.check("theorem-3.1", &m, &g, &ResidualOptions::default()),
            Err(Error::SingularGrid { .. })
        ));
    }

    #[test]
    fn wrong_delta_is_detected() {
        let m = LogisticModel::two_exponential(1.0, 1.0, 1.0, 1.0, 2.0).unwrap();
        let g = Grid::uniform(-2.0, 5.0, 71).unwrap();
        let opts = ResidualOptions::default();
        let good = residual_with_delta(&m, &g, -1.0, &opts).unwrap();
        assert!(good.max_norm <= 1e-8);
        for bad in [-1.5, -1.1, -0.9, 0.0, 1.0] {
            let r = residual_with_delta(&m, &g, bad, &opts).unwrap();
            assert!(r.max_norm > 1e-3, "delta {bad}: {}", r.max_norm);
        }
    }
}
