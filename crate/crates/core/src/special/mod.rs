//! Scalar special functions: the Gaussian tail `Q` and its inverse, the
//! exponential integral `E1`, and the Erlang law of sums of unit-mean
//! exponentials. Quadrature lives in [`quadrature`].

pub mod quadrature;

pub use quadrature::{integrate_expweighted, QuadratureKind, QuadratureRule};

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::{erfc, lgamma as ln_gamma};

use crate::error::{check_probability, Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Upper tail of the standard normal, `P[N(0,1) > x]`.
pub fn q_function(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            function: "q_function",
            value: x,
            expected: "finite x",
        });
    }
    Ok(q_unchecked(x))
}

#[inline]
pub(crate) fn q_unchecked(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Inverse of [`q_function`]: the `x` with `Q(x) = p`.
///
/// A rational approximation of the normal quantile seeds two Halley steps
/// on the erfc-based tail, which brings the relative error in `p` down to
/// roughly machine precision.
pub fn q_inverse(p: f64) -> Result<f64> {
    check_probability("q_inverse", p)?;
    Ok(q_inverse_unchecked(p))
}

pub(crate) fn q_inverse_unchecked(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    // Work in the smaller tail so the residual keeps relative precision.
    if p > 0.5 {
        return -q_inverse_unchecked(1.0 - p);
    }
    let mut x = -normal_quantile_guess(p);
    for _ in 0..2 {
        let residual = q_unchecked(x) - p;
        let u = residual / normal_pdf(x);
        // Q' = -phi, Q'' = x phi
        x += u / (1.0 + 0.5 * x * u);
    }
    x
}

// Acklam's rational approximation to the lower normal quantile,
// relative error about 1.15e-9.
fn normal_quantile_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

/// `∫_q^∞ Q(x) dx = φ(q) − q·Q(q)`.
pub fn q_tail_integral(q: f64) -> f64 {
    normal_pdf(q) - q * q_unchecked(q)
}

/// Exponential integral `E1(x) = ∫_1^∞ e^{-xt}/t dt`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    let scaled = exp_scaled_e1(x)?;
    Ok(scaled * (-x).exp())
}

/// `e^x · E1(x)`, which stays representable for large `x` where `E1`
/// itself underflows.
pub fn exp_scaled_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "exp_integral_e1",
            value: x,
            expected: "0 < x < inf",
        });
    }
    if x <= 1.0 {
        Ok(x.exp() * e1_series(x))
    } else {
        Ok(e1_continued_fraction_scaled(x))
    }
}

fn e1_series(x: f64) -> f64 {
    let mut sum = -x.ln() - EULER_GAMMA;
    let mut fact = 1.0;
    for i in 1..200 {
        let k = i as f64;
        fact *= -x / k;
        let term = -fact / k;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum
}

// Modified Lentz evaluation of the continued fraction for e^x E1(x).
fn e1_continued_fraction_scaled(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// CDF of the sum of `k` i.i.d. unit-mean exponentials (Erlang-`k`):
/// `1 − e^{−t} Σ_{j<k} t^j/j!`.
pub fn erlang_cdf(t: f64, k: u32) -> f64 {
    assert!(k >= 1, "erlang_cdf requires k >= 1");
    if t.is_nan() {
        return f64::NAN;
    }
    if t <= 0.0 {
        return 0.0;
    }
    if t == f64::INFINITY {
        return 1.0;
    }
    let kf = k as f64;
    if t < kf + 1.0 {
        // Lower series: e^{-t} t^k / k! · Σ t^n / ((k+1)…(k+n)).
        let lead = (-t + kf * t.ln() - ln_gamma(kf + 1.0)).exp();
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..10_000 {
            term *= t / (kf + n as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        (lead * sum).min(1.0)
    } else {
        1.0 - erlang_survival(t, k)
    }
}

fn erlang_survival(t: f64, k: u32) -> f64 {
    let ln_t = t.ln();
    (0..k)
        .map(|j| {
            let jf = j as f64;
            (-t + jf * ln_t - ln_gamma(jf + 1.0)).exp()
        })
        .sum::<f64>()
        .min(1.0)
}

fn erlang_pdf(t: f64, k: u32) -> f64 {
    if t <= 0.0 {
        return if k == 1 { 1.0 } else { 0.0 };
    }
    let kf = k as f64;
    (-t + (kf - 1.0) * t.ln() - ln_gamma(kf)).exp()
}

/// Inverse of [`erlang_cdf`] in `t`.
pub fn erlang_quantile(p: f64, k: u32) -> Result<f64> {
    check_probability("erlang_quantile", p)?;
    if k == 0 {
        return Err(Error::Domain {
            function: "erlang_quantile",
            value: 0.0,
            expected: "k >= 1",
        });
    }
    let mut lo = 0.0;
    let mut hi = k as f64;
    while erlang_cdf(hi, k) < p {
        lo = hi;
        hi *= 2.0;
    }
    // Newton with a bisection safeguard.
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let residual = erlang_cdf(t, k) - p;
        if residual == 0.0 {
            break;
        }
        if residual > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let density = erlang_pdf(t, k);
        let mut next = t - residual / density;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 1e-15 * t.max(1e-300) {
            t = next;
            break;
        }
        t = next;
    }
    Ok(t)
}
