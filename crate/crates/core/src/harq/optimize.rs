use super::ir::{ir_rate, ExpectedRoundsCurve};
use crate::channel::ChannelParams;
use crate::error::Result;

/// Result of maximising a long-term rate over the initial rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizedRate {
    pub r_opt: f64,
    pub rate_opt: f64,
    /// Initial rate meeting the outage target with equality.
    pub unoptimized_r: f64,
    pub unoptimized_rate: f64,
    /// True when the optimum is the constrained endpoint itself.
    pub at_endpoint: bool,
}

impl OptimizedRate {
    pub fn gain(&self) -> f64 {
        self.rate_opt - self.unoptimized_rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argument: f64,
    pub value: f64,
    pub at_upper_endpoint: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tolerance: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tolerance {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Global maximum of `f` on `(lo, hi]`.
///
/// `f` is sampled on `grid` equally spaced points; every sampled local
/// maximum is refined by golden-section search to `tolerance`, and the
/// upper endpoint competes as its own candidate. Ties go to the endpoint.
pub fn maximize_on_interval<F>(f: F, lo: f64, hi: f64, grid: usize, tolerance: f64) -> Maximum
where
    F: Fn(f64) -> f64,
{
    assert!(grid >= 2 && hi > lo);
    let mut xs: Vec<f64> = (0..=grid)
        .map(|i| lo + (hi - lo) * i as f64 / grid as f64)
        .collect();
    xs[grid] = hi;
    // The open lower end is never a candidate.
    let mut values = vec![f64::NEG_INFINITY];
    values.extend(xs[1..].iter().map(|&x| f(x)));

    let mut best = Maximum {
        argument: hi,
        value: values[grid],
        at_upper_endpoint: true,
    };
    for i in 1..grid {
        if values[i] >= values[i - 1] && values[i] > values[i + 1] {
            let (x, v) = golden_section(&f, xs[i - 1], xs[i + 1], tolerance);
            let (x, v) = if v >= values[i] { (x, v) } else { (xs[i], values[i]) };
            if v > best.value {
                best = Maximum {
                    argument: x,
                    value: v,
                    at_upper_endpoint: false,
                };
            }
        }
    }
    best
}

pub const RATE_GRID_POINTS: usize = 2000;

/// Maximises `R_init / E[X]` over `0 < R_init ≤ A_M⁻¹(ε)`. Any such rate
/// keeps the outage at or below `ε` since outage grows with `R_init`.
pub fn optimize_initial_rate(params: &ChannelParams, max_rounds: usize, epsilon: f64) -> Result<OptimizedRate> {
    let base = ir_rate(params, max_rounds, epsilon)?;
    let r_max = base.initial_rate;
    let curve = ExpectedRoundsCurve::build(params, max_rounds, r_max)?;
    let best = maximize_on_interval(|r| curve.rate(r), 0.0, r_max, RATE_GRID_POINTS, 1e-6);
    let (r_opt, rate_opt, at_endpoint) = if best.at_upper_endpoint || best.value <= base.longterm_rate {
        (r_max, base.longterm_rate, true)
    } else {
        (best.argument, best.value, false)
    };
    Ok(OptimizedRate {
        r_opt,
        rate_opt,
        unoptimized_r: r_max,
        unoptimized_rate: base.longterm_rate,
        at_endpoint,
    })
}
