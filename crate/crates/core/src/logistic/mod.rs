//! Logistic families: closed forms, derivatives, asymptotes and linearisations.
//!
//! Most normalized families share the shape `Z = 1 / (1 + μ P(x))`, where the
//! characteristic `P` is an eigenfunction of some linear operator
//! (`e^{−rx}`, `cosh rx`, a sum of exponentials, `1/e_ν(λx)`). Their jets are
//! assembled from the jet of `P`.

mod equations;
mod variable_rate;

use std::fmt;
use std::sync::Arc;

pub use equations::{
    governing_residual, residual_with_delta, EquationOrder, EquationRegistry, GoverningEquation,
    ResidualOptions, SingularBand,
};
pub use variable_rate::{variable_rate_solution, variable_rate_terms};

use crate::error::{Error, Result};
use crate::residual::{default_step, numeric_derivative};
use crate::special_fn::{gamma_real, tricomi_series, SeriesPolicy};

/// A scalar coefficient function of the abscissa.
#[derive(Clone)]
pub struct RateFn(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl RateFn {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        RateFn(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        RateFn::new(move |_| c)
    }

    pub fn at(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

impl fmt::Debug for RateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RateFn(..)")
    }
}

/// Logistic growth with time-dependent rate `r(x)` and quadratic loss `k(x)`:
/// `F' = r F − k F²`.
#[derive(Debug, Clone)]
pub struct VariableRate {
    pub rate: RateFn,
    pub loss: RateFn,
    pub f0: f64,
    pub quad_tol: f64,
}

impl VariableRate {
    pub fn new(rate: RateFn, loss: RateFn, f0: f64) -> Result<Self> {
        if !(f0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "f0 must be positive, got {f0}"
            )));
        }
        Ok(VariableRate {
            rate,
            loss,
            f0,
            quad_tol: 1e-13,
        })
    }
}

/// How the Tricomi function enters a Laguerre logistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TricomiNormalization {
    /// `e_ν(λx)` as is.
    Raw,
    /// `Γ(ν+1) e_ν(λx)`, so that `Z(0) = 1/(1+μ)` for every order.
    Gamma,
}

#[derive(Debug, Clone)]
pub enum LogisticModel {
    /// `F = f0 e^{rx} / (1 + (f0/K)(e^{rx} − 1))`.
    Classical {
        f0: f64,
        r: f64,
        capacity: f64,
    },
    /// `Z = 1 / (1 + μ e^{−rx})`.
    Normalized {
        mu: f64,
        r: f64,
    },
    /// `Z = 1 / (1 + μ(c1 e^{−r1 x} + c2 e^{−r2 x}))`.
    TwoExponential {
        mu: f64,
        c1: f64,
        r1: f64,
        c2: f64,
        r2: f64,
    },
    /// `Z = (1 + μ e^{−nrx})^{−1/n}`.
    Richards {
        mu: f64,
        r: f64,
        n: f64,
    },
    /// `σ = α + (λ / (χ + η e^{−kx}))^{1/n}`.
    Forestry {
        alpha: f64,
        lambda: f64,
        chi: f64,
        eta: f64,
        k: f64,
        n: f64,
    },
    /// `Z = 1 / (1 + μ cosh rx)`.
    CoshLc {
        mu: f64,
        r: f64,
    },
    /// `Z = 1 / (1 + μ / E(x))` with `E = e_ν(λx)` or `Γ(ν+1) e_ν(λx)`.
    LaguerreLogistic {
        mu: f64,
        lambda: f64,
        nu: f64,
        normalization: TricomiNormalization,
    },
    VariableRate(VariableRate),
}

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: Option<f64>,
}

impl Jet {
    pub fn d2(&self) -> Result<f64> {
        self.d2.ok_or_else(|| {
            Error::Unsupported("second derivative not available for this model".into())
        })
    }
}

/// Limit of a model as x → ±∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    /// Oscillating, leaving the domain, or not determined in closed form.
    Undefined,
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Finite(v) => write!(f, "{v}"),
            Limit::PlusInfinity => f.write_str("+inf"),
            Limit::MinusInfinity => f.write_str("-inf"),
            Limit::Undefined => f.write_str("undefined"),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite, got {v}"
        )))
    }
}

impl LogisticModel {
    pub fn classical(f0: f64, r: f64, capacity: f64) -> Result<Self> {
        positive("f0", f0)?;
        positive("K", capacity)?;
        finite("r", r)?;
        Ok(LogisticModel::Classical { f0, r, capacity })
    }

    pub fn normalized(mu: f64, r: f64) -> Result<Self> {
        positive("mu", mu)?;
        finite("r", r)?;
        Ok(LogisticModel::Normalized { mu, r })
    }

    pub fn two_exponential(mu: f64, c1: f64, r1: f64, c2: f64, r2: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("c1", c1), ("r1", r1), ("c2", c2), ("r2", r2)] {
            finite(name, v)?;
        }
        Ok(LogisticModel::TwoExponential { mu, c1, r1, c2, r2 })
    }

    pub fn richards(mu: f64, r: f64, n: f64) -> Result<Self> {
        positive("n", n)?;
        finite("mu", mu)?;
        finite("r", r)?;
        Ok(LogisticModel::Richards { mu, r, n })
    }

    pub fn forestry(alpha: f64, lambda: f64, chi: f64, eta: f64, k: f64, n: f64) -> Result<Self> {
        for (name, v) in [
            ("alpha", alpha),
            ("lambda", lambda),
            ("chi", chi),
            ("eta", eta),
            ("k", k),
        ] {
            finite(name, v)?;
        }
        positive("n", n)?;
        if lambda == 0.0 {
            return Err(Error::InvalidParameter("lambda must be non-zero".into()));
        }
        Ok(LogisticModel::Forestry {
            alpha,
            lambda,
            chi,
            eta,
            k,
            n,
        })
    }

    pub fn cosh_lc(mu: f64, r: f64) -> Result<Self> {
        positive("mu", mu)?;
        finite("r", r)?;
        Ok(LogisticModel::CoshLc { mu, r })
    }

    pub fn laguerre(
        mu: f64,
        lambda: f64,
        nu: f64,
        normalization: TricomiNormalization,
    ) -> Result<Self> {
        positive("mu", mu)?;
        positive("lambda", lambda)?;
        if !(nu > -1.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "nu must exceed -1, got {nu}"
            )));
        }
        Ok(LogisticModel::LaguerreLogistic {
            mu,
            lambda,
            nu,
            normalization,
        })
    }

    /// Short identifier used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            LogisticModel::Classical { .. } => "classical",
            LogisticModel::Normalized { .. } => "normalized",
            LogisticModel::TwoExponential { .. } => "two-exponential",
            LogisticModel::Richards { .. } => "richards",
            LogisticModel::Forestry { .. } => "forestry",
            LogisticModel::CoshLc { .. } => "cosh",
            LogisticModel::LaguerreLogistic {
                normalization: TricomiNormalization::Raw,
                ..
            } => "laguerre",
            LogisticModel::LaguerreLogistic {
                normalization: TricomiNormalization::Gamma,
                ..
            } => "laguerre-nu",
            LogisticModel::VariableRate(_) => "variable-rate",
        }
    }

    /// Kind plus parameters, for report metadata.
    pub fn label(&self) -> String {
        match self {
            LogisticModel::Classical { f0, r, capacity } => {
                format!("classical(f0={f0},r={r},K={capacity})")
            }
            LogisticModel::Normalized { mu, r } => format!("normalized(mu={mu},r={r})"),
            LogisticModel::TwoExponential { mu, c1, r1, c2, r2 } => {
                format!("two-exponential(mu={mu},c1={c1},r1={r1},c2={c2},r2={r2})")
            }
            LogisticModel::Richards { mu, r, n } => format!("richards(mu={mu},r={r},n={n})"),
            LogisticModel::Forestry {
                alpha,
                lambda,
                chi,
                eta,
                k,
                n,
            } => {
                format!("forestry(alpha={alpha},lambda={lambda},chi={chi},eta={eta},k={k},n={n})")
            }
            LogisticModel::CoshLc { mu, r } => format!("cosh(mu={mu},r={r})"),
            LogisticModel::LaguerreLogistic { mu, lambda, nu, .. } => {
                format!("{}(mu={mu},lambda={lambda},nu={nu})", self.kind())
            }
            LogisticModel::VariableRate(v) => format!("variable-rate(f0={})", v.f0),
        }
    }

    pub fn evaluate(&self, x: f64, policy: &SeriesPolicy) -> Result<f64> {
        evaluate(self, x, policy)
    }

    pub fn derivative(&self, x: f64, policy: &SeriesPolicy) -> Result<f64> {
        derivative(self, x, policy)
    }

    /// Closed-form value and derivatives. `d2` is `None` for the
    /// forestry and variable-rate families.
    pub fn jet(&self, x: f64, policy: &SeriesPolicy) -> Result<Jet> {
        analytic_jet(self, x, policy)
    }

    /// Value and derivatives from Richardson finite differences of
    /// [`LogisticModel::evaluate`].
    pub fn numeric_jet(&self, x: f64, policy: &SeriesPolicy) -> Result<Jet> {
        let value = self.evaluate(x, policy)?;
        let f = |t: f64| self.evaluate(t, policy).unwrap_or(f64::NAN);
        let d1 = numeric_derivative(&f, x, 1, default_step(x, 1))?.value;
        let d2 = numeric_derivative(&f, x, 2, default_step(x, 2))?.value;
        Ok(Jet {
            value,
            d1,
            d2: Some(d2),
        })
    }
}

/// Jet of `Z = 1/(1 + q)` given `q = μP` and its derivatives.
fn reciprocal_jet(x: f64, q: f64, q1: f64, q2: f64) -> Result<Jet> {
    if q.is_infinite() && q > 0.0 {
        return Ok(Jet {
            value: 0.0,
            d1: 0.0,
            d2: Some(0.0),
        });
    }
    let den = 1.0 + q;
    if den <= 0.0 || !den.is_finite() {
        return Err(Error::Domain {
            x,
            reason: format!("denominator 1 + μP = {den} is not positive"),
        });
    }
    let z = 1.0 / den;
    let d1 = -q1 * z * z;
    let d2 = -q2 * z * z + 2.0 * q1 * q1 * z * z * z;
    Ok(Jet {
        value: z,
        d1,
        d2: Some(d2),
    })
}

fn tricomi_scaled(
    nu: f64,
    lambda: f64,
    x: f64,
    normalization: TricomiNormalization,
    policy: &SeriesPolicy,
) -> Result<[f64; 3]> {
    let c = match normalization {
        TricomiNormalization::Raw => 1.0,
        TricomiNormalization::Gamma => gamma_real(nu + 1.0)?,
    };
    let y = lambda * x;
    Ok([
        c * tricomi_series(nu, y, policy)?,
        c * lambda * tricomi_series(nu + 1.0, y, policy)?,
        c * lambda * lambda * tricomi_series(nu + 2.0, y, policy)?,
    ])
}

/// `b^{1/n}` for a positive base, or the real odd root of a negative one.
fn real_root(x: f64, base: f64, n: f64) -> Result<f64> {
    if base > 0.0 {
        return Ok(base.powf(1.0 / n));
    }
    if base == 0.0 {
        return Ok(0.0);
    }
    if n.fract() == 0.0 && (n as i64) % 2 == 1 {
        return Ok(-(-base).powf(1.0 / n));
    }
    Err(Error::Domain {
        x,
        reason: format!("fractional power 1/{n} of negative base {base}"),
    })
}

fn analytic_jet(model: &LogisticModel, x: f64, policy: &SeriesPolicy) -> Result<Jet> {
    match model {
        LogisticModel::Classical { f0, r, capacity } => {
            let a = f0 / capacity;
            let c = f0 * r * (1.0 - a);
            if r * x > 0.0 {
                // divide through by e^{rx} to stay finite for large rx
                let s = (-r * x).exp();
                let den = s + a * (1.0 - s);
                Ok(Jet {
                    value: f0 / den,
                    d1: c * s / (den * den),
                    d2: Some(c * r * s * (den - 2.0 * a) / (den * den * den)),
                })
            } else {
                let e = (r * x).exp();
                let den = 1.0 + a * (e - 1.0);
                if den <= 0.0 {
                    return Err(Error::Domain {
                        x,
                        reason: "vanishing denominator".into(),
                    });
                }
                Ok(Jet {
                    value: f0 * e / den,
                    d1: c * e / (den * den),
                    d2: Some(c * r * e * (den - 2.0 * a * e) / (den * den * den)),
                })
            }
        }
        LogisticModel::Normalized { mu, r } => {
            let q = mu * (-r * x).exp();
            reciprocal_jet(x, q, -r * q, r * r * q)
        }
        LogisticModel::TwoExponential { mu, c1, r1, c2, r2 } => {
            let t1 = mu * c1 * (-r1 * x).exp();
            let t2 = mu * c2 * (-r2 * x).exp();
            reciprocal_jet(x, t1 + t2, -r1 * t1 - r2 * t2, r1 * r1 * t1 + r2 * r2 * t2)
        }
        LogisticModel::CoshLc { mu, r } => {
            let rx = r * x;
            reciprocal_jet(
                x,
                mu * rx.cosh(),
                mu * r * rx.sinh(),
                mu * r * r * rx.cosh(),
            )
        }
        LogisticModel::LaguerreLogistic {
            mu,
            lambda,
            nu,
            normalization,
        } => {
            // Z = E / (E + μ)
            let [e, e1, e2] = tricomi_scaled(*nu, *lambda, x, *normalization, policy)?;
            let den = e + mu;
            if den.abs() < 1e-300 || (e <= 0.0 && x < 0.0) {
                return Err(Error::Domain {
                    x,
                    reason: format!("Tricomi function {e} leaves the admissible range"),
                });
            }
            let inv = 1.0 / den;
            Ok(Jet {
                value: e * inv,
                d1: mu * e1 * inv * inv,
                d2: Some(mu * e2 * inv * inv - 2.0 * mu * e1 * e1 * inv * inv * inv),
            })
        }
        LogisticModel::Richards { mu, r, n } => {
            let q = mu * (-n * r * x).exp();
            let base = 1.0 + q;
            if !(base > 0.0) {
                return Err(Error::Domain {
                    x,
                    reason: format!("Richards base 1 + μe^(−nrx) = {base} is not positive"),
                });
            }
            if base.is_infinite() {
                return Ok(Jet {
                    value: 0.0,
                    d1: 0.0,
                    d2: Some(0.0),
                });
            }
            let z = base.powf(-1.0 / n);
            let d1 = r * q * z / base;
            let d2 = -n * r * r * q * z / (base * base) * (1.0 - q / n);
            Ok(Jet {
                value: z,
                d1,
                d2: Some(d2),
            })
        }
        LogisticModel::Forestry {
            alpha,
            lambda,
            chi,
            eta,
            k,
            n,
        } => {
            let s = eta * (-k * x).exp();
            let den = chi + s;
            if !(den > 0.0) {
                return Err(Error::Domain {
                    x,
                    reason: format!("χ + ηe^(−kx) = {den} is not positive"),
                });
            }
            let w = lambda / den;
            let root = real_root(x, w, *n)?;
            Ok(Jet {
                value: alpha + root,
                d1: k / n * root * s / den,
                d2: None,
            })
        }
        LogisticModel::VariableRate(v) => {
            let (value, d1) = variable_rate_terms(v, x)?;
            Ok(Jet {
                value,
                d1,
                d2: None,
            })
        }
    }
}

/// Closed-form value of the model at `x`.
pub fn evaluate(model: &LogisticModel, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    match model {
        LogisticModel::VariableRate(v) => {
            variable_rate_solution(&v.rate, &v.loss, v.f0, x, v.quad_tol)
        }
        _ => Ok(analytic_jet(model, x, policy)?.value),
    }
}

/// Closed-form first derivative at `x`.
pub fn derivative(model: &LogisticModel, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    Ok(analytic_jet(model, x, policy)?.d1)
}

/// Limit of `Σ c_i e^{−r_i x}` as x → +∞ (`sign = 1`) or −∞ (`sign = −1`).
fn exp_sum_limit(terms: &[(f64, f64)], sign: f64) -> Limit {
    // dominant exponent is the largest −r·sign among non-zero coefficients
    let active: Vec<(f64, f64)> = terms.iter().copied().filter(|(c, _)| *c != 0.0).collect();
    if active.is_empty() {
        return Limit::Finite(0.0);
    }
    let growth = active
        .iter()
        .map(|(_, r)| -r * sign)
        .fold(f64::NEG_INFINITY, f64::max);
    if growth < 0.0 {
        return Limit::Finite(0.0);
    }
    let lead: f64 = active
        .iter()
        .filter(|(_, r)| -r * sign == growth)
        .map(|(c, _)| c)
        .sum();
    if growth == 0.0 {
        return Limit::Finite(lead);
    }
    if lead > 0.0 {
        Limit::PlusInfinity
    } else if lead < 0.0 {
        Limit::MinusInfinity
    } else {
        Limit::Undefined
    }
}

/// Limit of `1/(1 + q)` given the limit of `q`.
fn reciprocal_limit(q: Limit) -> Limit {
    match q {
        Limit::Finite(v) if v > -1.0 => Limit::Finite(1.0 / (1.0 + v)),
        Limit::PlusInfinity => Limit::Finite(0.0),
        _ => Limit::Undefined,
    }
}

/// Limits as x → −∞ and x → +∞.
pub fn asymptotes(model: &LogisticModel) -> (Limit, Limit) {
    let at = |sign: f64| -> Limit {
        match model {
            LogisticModel::Classical { f0, r, capacity } => {
                let growth = r * sign;
                if growth > 0.0 {
                    Limit::Finite(*capacity)
                } else if growth < 0.0 {
                    Limit::Finite(0.0)
                } else {
                    Limit::Finite(*f0)
                }
            }
            LogisticModel::Normalized { mu, r } => {
                reciprocal_limit(exp_sum_limit(&[(*mu, *r)], sign))
            }
            LogisticModel::TwoExponential { mu, c1, r1, c2, r2 } => {
                reciprocal_limit(exp_sum_limit(&[(mu * c1, *r1), (mu * c2, *r2)], sign))
            }
            LogisticModel::CoshLc { mu, r } => {
                // μ cosh rx = (μ/2)(e^{rx} + e^{−rx})
                reciprocal_limit(exp_sum_limit(&[(mu / 2.0, *r), (mu / 2.0, -r)], sign))
            }
            LogisticModel::Richards { mu, r, n } => match exp_sum_limit(&[(*mu, n * r)], sign) {
                Limit::Finite(v) if v > -1.0 => Limit::Finite((1.0 + v).powf(-1.0 / n)),
                Limit::PlusInfinity => Limit::Finite(0.0),
                _ => Limit::Undefined,
            },
            LogisticModel::Forestry {
                alpha,
                lambda,
                chi,
                eta,
                k,
                n,
            } => match exp_sum_limit(&[(*eta, *k)], sign) {
                Limit::Finite(s) => {
                    let den = chi + s;
                    if den == 0.0 {
                        if lambda > &0.0 {
                            Limit::PlusInfinity
                        } else {
                            Limit::Undefined
                        }
                    } else {
                        match real_root(0.0, lambda / den, *n) {
                            Ok(root) => Limit::Finite(alpha + root),
                            Err(_) => Limit::Undefined,
                        }
                    }
                }
                Limit::PlusInfinity => Limit::Finite(*alpha),
                _ => Limit::Undefined,
            },
            LogisticModel::LaguerreLogistic { .. } => {
                // e_ν(λx) grows without bound for x → +∞ and oscillates for x → −∞
                if sign > 0.0 {
                    Limit::Finite(1.0)
                } else {
                    Limit::Undefined
                }
            }
            LogisticModel::VariableRate(_) => Limit::Undefined,
        }
    };
    (at(-1.0), at(1.0))
}

/// `Δ = −μ (r2 − r1) / r1` of the exponential carrying-capacity equation.
pub fn two_exp_delta(mu: f64, r1: f64, r2: f64) -> Result<f64> {
    if r1 == 0.0 {
        return Err(Error::DivisionByZero(
            "two-exponential delta needs r1 != 0".into(),
        ));
    }
    Ok(-mu * (r2 - r1) / r1)
}

/// A coefficient of a linear ODE.
#[derive(Debug, Clone)]
pub enum Coefficient {
    Constant(f64),
    Function(RateFn),
}

impl Coefficient {
    pub fn at(&self, x: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Function(f) => f.at(x),
        }
    }
}

/// Linear counterpart `Y' = −a(x) Y + b(x)` of a Riccati-type model under
/// the substitution `Y = F^{−power}`.
#[derive(Debug, Clone)]
pub struct LinearDescriptor {
    pub substitution: &'static str,
    pub power: f64,
    pub rate: Coefficient,
    pub source: Coefficient,
    /// Initial abscissa and `Y` there.
    pub initial: (f64, f64),
    /// Rate coefficient as it is usually printed for this model, when it
    /// differs from the one that actually holds.
    pub stated_rate: Option<f64>,
}

impl LinearDescriptor {
    pub fn forward(&self, f: f64) -> f64 {
        f.powf(-self.power)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        y.powf(-1.0 / self.power)
    }

    pub fn rhs(&self, x: f64, y: f64) -> f64 {
        -self.rate.at(x) * y + self.source.at(x)
    }
}

/// Linearises the Riccati-type families.
pub fn linearize(model: &LogisticModel) -> Result<LinearDescriptor> {
    match model {
        LogisticModel::Classical { f0, r, capacity } => Ok(LinearDescriptor {
            substitution: "E = 1/F",
            power: 1.0,
            rate: Coefficient::Constant(*r),
            source: Coefficient::Constant(r / capacity),
            initial: (0.0, 1.0 / f0),
            stated_rate: None,
        }),
        LogisticModel::Normalized { mu, r } => Ok(LinearDescriptor {
            substitution: "E = 1/Z",
            power: 1.0,
            rate: Coefficient::Constant(*r),
            source: Coefficient::Constant(*r),
            initial: (0.0, 1.0 + mu),
            stated_rate: None,
        }),
        LogisticModel::Richards { mu, r, n } => Ok(LinearDescriptor {
            substitution: "Y = Z^(-n)",
            power: *n,
            rate: Coefficient::Constant(n * r),
            source: Coefficient::Constant(n * r),
            initial: (0.0, 1.0 + mu),
            stated_rate: Some(r / n),
        }),
        LogisticModel::VariableRate(v) => Ok(LinearDescriptor {
            substitution: "E = 1/F",
            power: 1.0,
            rate: Coefficient::Function(v.rate.clone()),
            source: Coefficient::Function(v.loss.clone()),
            initial: (0.0, 1.0 / v.f0),
            stated_rate: None,
        }),
        other => Err(Error::Unsupported(format!(
            "no linearisation for the {} family",
            other.kind()
        ))),
    }
}
