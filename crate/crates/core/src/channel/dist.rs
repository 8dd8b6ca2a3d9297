use std::f64::consts::{LN_2, LOG2_E};

use rayon::prelude::*;

use super::lattice::{LatticeLaw, Trim};
use super::{mean_mutual_info, std_mutual_info, ChannelParams};
use crate::error::{check_probability, Error, Result};
use crate::rng::{exp1, stream_rng};

/// Discretisation settings for exact (grid) distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Lattice cells per standard deviation of a single summand.
    pub steps_per_sigma: f64,
    /// Mass that may be discarded at each end of the window per convolution.
    pub tail_tolerance: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            steps_per_sigma: 1000.0,
            tail_tolerance: 1e-15,
        }
    }
}

/// Builds lattice laws of partial sums of per-block mutual information.
#[derive(Debug, Clone)]
pub(crate) struct MiSumEngine {
    snr: f64,
    step: f64,
    tolerance: f64,
}

impl MiSumEngine {
    pub(crate) fn new(params: &ChannelParams, options: GridOptions) -> Result<Self> {
        if params.intra_round_diversity() != 1 {
            return Err(Error::Unsupported(
                "exact sum distributions require intra-round diversity F = 1",
            ));
        }
        let sigma = std_mutual_info(params)?;
        Ok(Self {
            snr: params.snr(),
            step: sigma / options.steps_per_sigma,
            tolerance: options.tail_tolerance,
        })
    }

    pub(crate) fn step(&self) -> f64 {
        self.step
    }

    fn trim(&self, cap: Option<f64>) -> Trim {
        Trim {
            tolerance: self.tolerance,
            cap,
        }
    }

    /// Single-block law: cell masses are exact differences of the closed
    /// form CDF `1 − exp(−(2^y − 1)/snr)`.
    pub(crate) fn block(&self, cap: Option<f64>) -> LatticeLaw {
        let snr = self.snr;
        let survival_exponent = |y: f64| (y * LN_2).exp_m1() / snr;
        // Survival exp(-(2^y-1)/snr) falls below ~1e-30 past this point.
        let top = (1.0 + 70.0 * snr).log2();
        let top = cap.map_or(top, |c| top.min(c + 2.0 * self.step));
        let cells = (top / self.step).ceil().max(1.0) as usize;
        let mut pmf = Vec::with_capacity(cells);
        let mut prev: f64 = 0.0;
        for j in 0..cells {
            let next = survival_exponent((j + 1) as f64 * self.step);
            // S(a) - S(b) = e^{-a'}(1 - e^{-(b'-a')})
            pmf.push((-prev).exp() * -(-(next - prev)).exp_m1());
            prev = next;
        }
        let above = (-prev).exp();
        let mut law = LatticeLaw::from_cells(self.step, 0.0, pmf, 0.0, above);
        law = law.power(1, self.trim(cap));
        law
    }

    /// Law of the sum over `k` blocks. With a cap the result is exact only
    /// for CDF queries at or below the cap.
    pub(crate) fn sum(&self, k: usize, cap: Option<f64>) -> LatticeLaw {
        self.block(cap).power(k, self.trim(cap))
    }

    /// Visits the laws of the partial sums over `1..=k_max` blocks in order.
    pub(crate) fn for_each_partial_sum<F>(&self, k_max: usize, cap: Option<f64>, mut visit: F)
    where
        F: FnMut(usize, &LatticeLaw),
    {
        if k_max == 0 {
            return;
        }
        let block = self.block(cap);
        let mut acc = block.clone();
        visit(1, &acc);
        for k in 2..=k_max {
            acc = acc.convolve(&block, self.trim(cap));
            visit(k, &acc);
        }
    }
}

/// `P[Σ_{i=1}^k log2(1 + snr|h_i|²) ≤ threshold]` by lattice convolution.
pub fn mi_sum_cdf(params: &ChannelParams, k: usize, threshold: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidConfig("block count k must be >= 1".into()));
    }
    if !(threshold >= 0.0) {
        return Err(Error::Domain {
            function: "mi_sum_cdf",
            value: threshold,
            expected: "threshold >= 0",
        });
    }
    if threshold == 0.0 {
        return Ok(0.0);
    }
    let engine = MiSumEngine::new(params, GridOptions::default())?;
    let cap = threshold + 2.0 * engine.step();
    Ok(engine.sum(k, Some(cap)).cdf(threshold))
}

/// The `p`-quantile of the accumulated mutual information over `k` blocks.
pub fn mi_sum_quantile(params: &ChannelParams, k: usize, p: f64) -> Result<f64> {
    check_probability("mi_sum_quantile", p)?;
    if k == 0 {
        return Err(Error::InvalidConfig("block count k must be >= 1".into()));
    }
    let engine = MiSumEngine::new(params, GridOptions::default())?;
    engine.sum(k, None).quantile(p)
}

/// Single-draw law of `log2|h|²` with `|h|² ~ Exp(1)`: CDF `1 − exp(−2^y)`.
fn log_fading_block(step: f64, tolerance: f64) -> LatticeLaw {
    // Lower tail ~ 2^y, upper tail exp(-2^y).
    let lo_cell = ((tolerance * 1e-3).log2() / step).floor() as i64;
    let hi_cell = ((1.0 / (tolerance * 1e-3)).ln().log2() / step).ceil() as i64;
    let survival_exponent = |j: i64| ((j as f64) * step * LN_2).exp();
    let mut pmf = Vec::with_capacity((hi_cell - lo_cell) as usize);
    let mut prev = survival_exponent(lo_cell);
    let below = -(-prev).exp_m1();
    for j in lo_cell..hi_cell {
        let next = survival_exponent(j + 1);
        pmf.push((-prev).exp() * -(-(next - prev)).exp_m1());
        prev = next;
    }
    let above = (-prev).exp();
    LatticeLaw::from_cells(step, lo_cell as f64 * step, pmf, below, above)
}

/// `p`-quantile of `(1/k) Σ log2|h_i|²`, the SNR-free part of the
/// high-SNR outage rate. Tends to `E[log2|h|²] = −γ·log2(e)` as `k` grows.
pub fn log_fading_quantile(k: usize, p: f64) -> Result<f64> {
    check_probability("log_fading_quantile", p)?;
    if k == 0 {
        return Err(Error::InvalidConfig("block count k must be >= 1".into()));
    }
    let sigma = std::f64::consts::PI * LOG2_E / 6f64.sqrt();
    let options = GridOptions::default();
    let step = sigma / options.steps_per_sigma;
    let trim = Trim {
        tolerance: options.tail_tolerance,
        cap: None,
    };
    let law = log_fading_block(step, options.tail_tolerance).power(k, trim);
    Ok(law.quantile(p)? / k as f64)
}

/// Raw Monte Carlo draws with their order-statistic view.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    draws: Vec<f64>,
    sorted: Vec<f64>,
    seed: u64,
}

impl EmpiricalCdf {
    pub fn new(draws: Vec<f64>, seed: u64) -> Self {
        let mut sorted = draws.clone();
        sorted.sort_by(f64::total_cmp);
        Self { draws, sorted, seed }
    }

    /// Draws in generation order.
    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.draws.iter().sum::<f64>() / self.draws.len() as f64
    }

    /// Sample standard deviation.
    pub fn std(&self) -> f64 {
        let m = self.mean();
        let n = self.draws.len() as f64;
        (self.draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Inverse ECDF: the smallest draw whose ECDF reaches `p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability("EmpiricalCdf::quantile", p)?;
        let n = self.sorted.len();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        Ok(self.sorted[idx])
    }
}

/// Numerical representation of a scalar random variable's law.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionEstimate {
    GridCdf(LatticeLaw),
    Empirical(EmpiricalCdf),
}

impl DistributionEstimate {
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::GridCdf(law) => law.cdf(x),
            Self::Empirical(e) => e.cdf(x),
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability("DistributionEstimate::quantile", p)?;
        match self {
            Self::GridCdf(law) => law.quantile(p),
            Self::Empirical(e) => e.quantile(p),
        }
    }

    pub fn as_empirical(&self) -> Option<&EmpiricalCdf> {
        match self {
            Self::Empirical(e) => Some(e),
            Self::GridCdf(_) => None,
        }
    }
}

const CHUNK: usize = 1 << 16;

fn block_draw<R: rand::Rng>(rng: &mut R, snr: f64, f: u32) -> f64 {
    if f == 1 {
        return (snr * exp1(rng)).ln_1p() * LOG2_E;
    }
    let total: f64 = (0..f).map(|_| (snr * exp1(rng)).ln_1p()).sum();
    total * LOG2_E / f as f64
}

fn sample_with<F>(count: usize, seed: u64, draw: F) -> Vec<f64>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let n = CHUNK.min(count - c * CHUNK);
            (0..n).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.concat()
}

/// `count` i.i.d. draws of one block's mutual information,
/// `(1/F) Σ_l log2(1 + snr·e_l)` with `e_l ~ Exp(1)`.
pub fn sample_block_mi(params: &ChannelParams, count: usize, seed: u64) -> Result<DistributionEstimate> {
    sample_mi_sum(params, 1, count, seed)
}

/// `count` i.i.d. draws of the mutual information accumulated over `k`
/// blocks.
pub fn sample_mi_sum(
    params: &ChannelParams,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<DistributionEstimate> {
    if count == 0 || k == 0 {
        return Err(Error::InvalidConfig("sample count and k must be >= 1".into()));
    }
    let snr = params.snr();
    let f = params.intra_round_diversity();
    let draws = sample_with(count, seed, |rng| (0..k).map(|_| block_draw(rng, snr, f)).sum());
    Ok(DistributionEstimate::Empirical(EmpiricalCdf::new(draws, seed)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    Sum,
    Average,
}

/// Law of the mutual information accumulated (or averaged) over `blocks`
/// independent fading blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MutualInfoDist {
    snr: f64,
    blocks: usize,
    mode: SumMode,
    representation: DistributionEstimate,
}

impl MutualInfoDist {
    /// Grid representation by lattice convolution.
    pub fn exact(params: &ChannelParams, blocks: usize, mode: SumMode) -> Result<Self> {
        Self::exact_with(params, blocks, mode, GridOptions::default())
    }

    pub fn exact_with(
        params: &ChannelParams,
        blocks: usize,
        mode: SumMode,
        options: GridOptions,
    ) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::InvalidConfig("block count must be >= 1".into()));
        }
        let engine = MiSumEngine::new(params, options)?;
        Ok(Self {
            snr: params.snr(),
            blocks,
            mode,
            representation: DistributionEstimate::GridCdf(engine.sum(blocks, None)),
        })
    }

    /// Monte Carlo representation.
    pub fn empirical(
        params: &ChannelParams,
        blocks: usize,
        mode: SumMode,
        count: usize,
        seed: u64,
    ) -> Result<Self> {
        Ok(Self {
            snr: params.snr(),
            blocks,
            mode,
            representation: sample_mi_sum(params, blocks, count, seed)?,
        })
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn mode(&self) -> SumMode {
        self.mode
    }

    pub fn representation(&self) -> &DistributionEstimate {
        &self.representation
    }

    fn scale(&self) -> f64 {
        match self.mode {
            SumMode::Sum => 1.0,
            SumMode::Average => self.blocks as f64,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.representation.cdf(x * self.scale())
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.representation.quantile(p)? / self.scale())
    }

    /// Mean of the represented variable.
    pub fn mean(&self) -> f64 {
        let m = match &self.representation {
            DistributionEstimate::GridCdf(law) => law.mean(),
            DistributionEstimate::Empirical(e) => e.mean(),
        };
        m / self.scale()
    }
}

/// `P[N(kμ, kσ²) ≤ threshold]`, the normal surrogate for the accumulated
/// mutual information.
pub fn gaussian_sum_cdf(params: &ChannelParams, k: usize, threshold: f64) -> Result<f64> {
    let mu = mean_mutual_info(params);
    let sigma = std_mutual_info(params)?;
    let kf = k as f64;
    Ok(crate::special::q_unchecked((kf * mu - threshold) / (sigma * kf.sqrt())))
}
