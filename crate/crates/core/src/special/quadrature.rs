//! Integration against the unit exponential weight, `∫₀^∞ f(x) e^{−x} dx`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    GaussLaguerre,
    AdaptiveSimpson,
}

/// A rule for `∫₀^∞ f(x) e^{−x} dx`.
///
/// Gauss-Laguerre rules carry their nodes and weights. The adaptive
/// Simpson rule chooses nodes per integrand, so it only carries a
/// tolerance; it integrates in the variable `u = ln x`, which tames the
/// near-endpoint logarithmic behaviour of `log2(1 + snr·x)` at high SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    kind: QuadratureKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    tolerance: f64,
}

pub const DEFAULT_LAGUERRE_ORDER: usize = 200;

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss_laguerre(DEFAULT_LAGUERRE_ORDER)
    }
}

impl QuadratureRule {
    /// `n`-point Gauss-Laguerre rule.
    ///
    /// Nodes whose weight underflows `f64` are dropped, so for large `n`
    /// the rule may hold slightly fewer than `n` points.
    pub fn gauss_laguerre(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Laguerre order must be positive");
        let (nodes, weights) = laguerre_nodes_weights(n);
        Self {
            kind: QuadratureKind::GaussLaguerre,
            nodes,
            weights,
            tolerance: 0.0,
        }
    }

    pub fn adaptive_simpson(tolerance: f64) -> Self {
        assert!(tolerance > 0.0);
        Self {
            kind: QuadratureKind::AdaptiveSimpson,
            nodes: Vec::new(),
            weights: Vec::new(),
            tolerance,
        }
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

// Newton iteration on the three-term recurrence, with initial guesses from
// the classic asymptotic formulas. The recurrence is rescaled as it runs so
// that L_n(x) for x in the hundreds neither overflows nor loses the weight.
fn laguerre_nodes_weights(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut z: f64 = 0.0;
    for i in 0..n {
        if i == 0 {
            z = 3.0 / (1.0 + 2.4 * nf);
        } else if i == 1 {
            z += 15.0 / (1.0 + 2.5 * nf);
        } else {
            let ai = (i - 1) as f64;
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2]);
        }
        let mut eval = LaguerreEval::at(n, z);
        for _ in 0..100 {
            let step = eval.value / eval.derivative;
            z -= step;
            eval = LaguerreEval::at(n, z);
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes.push(z);
        // w = -1 / (n L_n'(z) L_{n-1}(z)), assembled in log space.
        let ln_w = -(nf.ln()
            + eval.derivative.abs().ln()
            + eval.previous.abs().ln()
            + 2.0 * eval.ln_scale);
        weights.push(ln_w.exp());
    }
    let keep: Vec<usize> = (0..n).filter(|&i| weights[i] > 0.0).collect();
    (
        keep.iter().map(|&i| nodes[i]).collect(),
        keep.iter().map(|&i| weights[i]).collect(),
    )
}

struct LaguerreEval {
    value: f64,
    previous: f64,
    derivative: f64,
    // true value = stored value * exp(ln_scale)
    ln_scale: f64,
}

impl LaguerreEval {
    fn at(n: usize, x: f64) -> Self {
        let mut p_prev = 0.0;
        let mut p = 1.0;
        let mut ln_scale = 0.0;
        for j in 1..=n {
            let jf = j as f64;
            let next = ((2.0 * jf - 1.0 - x) * p - (jf - 1.0) * p_prev) / jf;
            p_prev = p;
            p = next;
            if p.abs() > 1e150 {
                p *= 1e-150;
                p_prev *= 1e-150;
                ln_scale += 150.0 * std::f64::consts::LN_10;
            }
        }
        let nf = n as f64;
        Self {
            value: p,
            previous: p_prev,
            derivative: nf * (p - p_prev) / x,
            ln_scale,
        }
    }
}

/// `∫₀^∞ f(x) e^{−x} dx` under `rule`.
pub fn integrate_expweighted<F>(f: F, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    match rule.kind {
        QuadratureKind::GaussLaguerre => {
            let mut sum = 0.0;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let v = f(x);
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand { node: x });
                }
                sum += w * v;
            }
            Ok(sum)
        }
        QuadratureKind::AdaptiveSimpson => {
            // x = e^u; the weight e^{-x} dx becomes e^{u - e^u} du.
            let g = |u: f64| {
                let x = u.exp();
                let v = f(x);
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand { node: x });
                }
                Ok(v * (u - x).exp())
            };
            // Below u = -45 the remaining mass is e^{-45} times f's scale.
            let breaks = [-45.0, -20.0, -8.0, -2.0, 0.0, 1.5, 3.0, 4.5, 6.7];
            let mut sum = 0.0;
            for w in breaks.windows(2) {
                sum += adaptive_simpson(&g, w[0], w[1], rule.tolerance)?;
            }
            Ok(sum)
        }
    }
}

/// Adaptive Simpson integration of a fallible integrand over `[a, b]`.
pub fn adaptive_simpson<G>(g: &G, a: f64, b: f64, tolerance: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let fa = g(a)?;
    let fb = g(b)?;
    let m = 0.5 * (a + b);
    let fm = g(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(g, a, b, fa, fm, fb, whole, tolerance, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<G>(
    g: &G,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tolerance: f64,
    depth: u32,
) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm)?;
    let frm = g(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tolerance {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(g, a, m, fa, flm, fm, left, 0.5 * tolerance, depth - 1)?
        + simpson_step(g, m, b, fm, frm, fb, right, 0.5 * tolerance, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_rule_invariants() {
        for n in [1, 2, 5, 20, 64, 200] {
            let rule = QuadratureRule::gauss_laguerre(n);
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]), "n={n}");
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n} sum={total}");
        }
    }

    #[test]
    fn laguerre_is_exact_for_low_degree() {
        // ∫ x^d e^{-x} = d!
        let rule = QuadratureRule::gauss_laguerre(20);
        let mut fact = 1.0;
        for d in 0..40 {
            if d > 0 {
                fact *= d as f64;
            }
            let got = integrate_expweighted(|x| x.powi(d), &rule).unwrap();
            assert!(((got - fact) / fact).abs() < 1e-10, "degree {d}: {got} vs {fact}");
        }
        let big = QuadratureRule::default();
        let mut fact = 1.0;
        for d in 0..12 {
            if d > 0 {
                fact *= d as f64;
            }
            let got = integrate_expweighted(|x| x.powi(d), &big).unwrap();
            assert!(((got - fact) / fact).abs() < 1e-10, "degree {d}");
        }
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        let rule = QuadratureRule::gauss_laguerre(10);
        let first = rule.nodes()[0];
        let err = integrate_expweighted(|x| if x == first { f64::NAN } else { 1.0 }, &rule);
        assert_eq!(err, Err(Error::NonFiniteIntegrand { node: first }));
    }

    #[test]
    fn adaptive_rule_normalisation() {
        let rule = QuadratureRule::adaptive_simpson(1e-14);
        let one = integrate_expweighted(|_| 1.0, &rule).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let mean = integrate_expweighted(|x| x, &rule).unwrap();
        assert!((mean - 1.0).abs() < 1e-12);
    }
}
