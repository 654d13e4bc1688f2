//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 50;

/// Kronrod nodes mapped to [a, b], in a fixed order matching [`panel_rule`].
pub fn panel_nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut nodes = [c; 15];
    for i in 0..7 {
        nodes[2 * i] = c - h * XGK[i];
        nodes[2 * i + 1] = c + h * XGK[i];
    }
    nodes
}

/// Kronrod estimate and |Kronrod − Gauss| from values at [`panel_nodes`].
pub fn panel_rule(a: f64, b: f64, values: &[f64; 15]) -> (f64, f64) {
    let h = 0.5 * (b - a);
    let mut kronrod = WGK[7] * values[14];
    let mut gauss = WG[3] * values[14];
    for i in 0..7 {
        let pair = values[2 * i] + values[2 * i + 1];
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// ∫_a^b f with absolute-or-relative tolerance `tol`. Reversed bounds give
/// the negated integral.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let whole = estimate(f, a, b);
    let target = tol * whole.0.abs().max(1.0);
    refine(f, a, b, whole, target, 0).map_err(|_| Error::QuadratureNonConvergence { a, b, tol })
}

fn estimate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let nodes = panel_nodes(a, b);
    let values = nodes.map(f);
    panel_rule(a, b, &values)
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    panel: (f64, f64),
    target: f64,
    depth: u32,
) -> Result<f64> {
    let (value, err) = panel;
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("integrand on [{a}, {b}]")));
    }
    if err <= target {
        return Ok(value);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureNonConvergence { a, b, tol: target });
    }
    let m = 0.5 * (a + b);
    let left = refine(f, a, m, estimate(f, a, m), 0.5 * target, depth + 1)?;
    let right = refine(f, m, b, estimate(f, m, b), 0.5 * target, depth + 1)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(&|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-14).unwrap();
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn exponential_and_reversed() {
        let v = integrate(&f64::exp, 0.0, 10.0, 1e-14).unwrap();
        assert!((v / (10f64.exp() - 1.0) - 1.0).abs() < 1e-13);
        let w = integrate(&f64::exp, 10.0, 0.0, 1e-14).unwrap();
        assert_eq!(v, -w);
    }

    #[test]
    fn peaked_integrand_refines() {
        let v = integrate(&|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12).unwrap();
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        assert!((v / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singular_integrand_fails() {
        assert!(integrate(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-12).is_err());
    }
}
