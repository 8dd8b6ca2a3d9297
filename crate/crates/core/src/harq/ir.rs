use super::{HarqAnalysis, Protocol};
use crate::channel::{mi_sum_cdf, ChannelParams, GridOptions, MiSumEngine};
use crate::error::{check_probability, Error, Result};

/// `A_k(R) = P[Σ_{i=1}^k log2(1 + snr|h_i|²) ≤ R]`: probability the message
/// is still undecodable after `k` IR rounds.
pub fn ak_probability(params: &ChannelParams, k: usize, r_init: f64) -> Result<f64> {
    mi_sum_cdf(params, k, r_init)
}

fn engine(params: &ChannelParams) -> Result<MiSumEngine> {
    MiSumEngine::new(params, GridOptions::default())
}

/// `(A_1(R), …, A_{M−1}(R), A_M(R))` from one pass of partial-sum convolutions.
fn continuation_probabilities(
    engine: &MiSumEngine,
    max_rounds: usize,
    r_init: f64,
) -> (Vec<f64>, f64) {
    let cap = r_init + 2.0 * engine.step();
    let mut a = Vec::with_capacity(max_rounds);
    engine.for_each_partial_sum(max_rounds, Some(cap), |_, law| a.push(law.cdf(r_init)));
    let outage = a.pop().expect("max_rounds >= 1");
    (a, outage)
}

fn check_rate(function: &'static str, r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            value: r,
            expected: "0 <= R_init < inf",
        })
    }
}

/// `E[X] = 1 + Σ_{k=1}^{M−1} A_k(R_init)` for IR.
pub fn expected_rounds_ir(params: &ChannelParams, max_rounds: usize, r_init: f64) -> Result<f64> {
    Ok(ir_rate_at(params, max_rounds, r_init)?.expected_rounds)
}

/// IR operating point at an arbitrary initial rate.
pub fn ir_rate_at(params: &ChannelParams, max_rounds: usize, r_init: f64) -> Result<HarqAnalysis> {
    if max_rounds == 0 {
        return Err(Error::InvalidConfig("max rounds M must be >= 1".into()));
    }
    check_rate("ir_rate_at", r_init)?;
    if r_init == 0.0 {
        let zeros = vec![0.0; max_rounds - 1];
        return Ok(HarqAnalysis::from_continuation(
            Protocol::IncrementalRedundancy,
            0.0,
            &zeros,
            0.0,
        ));
    }
    let engine = engine(params)?;
    let (a, outage) = continuation_probabilities(&engine, max_rounds, r_init);
    Ok(HarqAnalysis::from_continuation(
        Protocol::IncrementalRedundancy,
        r_init,
        &a,
        outage,
    ))
}

/// IR with `R_init = M·C_ε^M = A_M⁻¹(ε)`, so outage at termination is `ε`.
pub fn ir_rate(params: &ChannelParams, max_rounds: usize, epsilon: f64) -> Result<HarqAnalysis> {
    check_probability("ir_rate", epsilon)?;
    if max_rounds == 0 {
        return Err(Error::InvalidConfig("max rounds M must be >= 1".into()));
    }
    let engine = engine(params)?;
    let r_init = engine.sum(max_rounds, None).quantile(epsilon)?;
    let (a, outage) = continuation_probabilities(&engine, max_rounds, r_init);
    Ok(HarqAnalysis::from_continuation(
        Protocol::IncrementalRedundancy,
        r_init,
        &a,
        outage,
    ))
}

/// `E[X]` as a function of `R_init` over `[0, r_max]`.
///
/// Each `A_k` is piecewise linear with knots on multiples of half a lattice
/// step, so sampling `Σ A_k` there and interpolating linearly is exact with
/// respect to the lattice laws.
#[derive(Debug, Clone)]
pub struct ExpectedRoundsCurve {
    spacing: f64,
    continuation_sum: Vec<f64>,
    r_max: f64,
}

impl ExpectedRoundsCurve {
    pub fn build(params: &ChannelParams, max_rounds: usize, r_max: f64) -> Result<Self> {
        if max_rounds == 0 {
            return Err(Error::InvalidConfig("max rounds M must be >= 1".into()));
        }
        check_rate("ExpectedRoundsCurve", r_max)?;
        let engine = engine(params)?;
        let spacing = 0.5 * engine.step();
        let n = (r_max / spacing).ceil() as usize + 1;
        let mut continuation_sum = vec![0.0; n + 1];
        if max_rounds > 1 {
            let cap = r_max + 2.0 * engine.step();
            engine.for_each_partial_sum(max_rounds - 1, Some(cap), |_, law| {
                for (i, g) in continuation_sum.iter_mut().enumerate() {
                    *g += law.cdf(i as f64 * spacing);
                }
            });
        }
        Ok(Self {
            spacing,
            continuation_sum,
            r_max,
        })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn expected_rounds(&self, r_init: f64) -> f64 {
        let u = (r_init / self.spacing).max(0.0);
        let last = self.continuation_sum.len() - 1;
        let i = (u.floor() as usize).min(last - 1);
        let frac = (u - i as f64).min(1.0);
        let g = self.continuation_sum[i] + frac * (self.continuation_sum[i + 1] - self.continuation_sum[i]);
        1.0 + g
    }

    pub fn rate(&self, r_init: f64) -> f64 {
        r_init / self.expected_rounds(r_init)
    }
}
