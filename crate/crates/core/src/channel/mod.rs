//! Statistics of the per-block mutual information `log2(1 + snr·|h|²)`
//! under unit-variance Rayleigh fading.

mod dist;
pub(crate) mod lattice;

pub use dist::{
    gaussian_sum_cdf, log_fading_quantile, mi_sum_cdf, mi_sum_quantile, sample_block_mi, sample_mi_sum,
    DistributionEstimate, EmpiricalCdf, GridOptions, MutualInfoDist, SumMode,
};
#[allow(unused_imports)]
pub(crate) use dist::MiSumEngine;
pub use lattice::LatticeLaw;

use std::f64::consts::LOG2_E;

use crate::error::{Error, Result};
use crate::special::{exp_scaled_e1, integrate_expweighted, QuadratureRule};

/// Average received SNR plus the optional number `F` of independently
/// faded sub-channels averaged within each block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    snr: f64,
    intra_round_diversity: u32,
}

impl ChannelParams {
    pub fn from_linear(snr: f64) -> Result<Self> {
        if !(snr > 0.0) || !snr.is_finite() {
            return Err(Error::Domain {
                function: "ChannelParams",
                value: snr,
                expected: "0 < snr < inf",
            });
        }
        Ok(Self {
            snr,
            intra_round_diversity: 1,
        })
    }

    pub fn from_db(snr_db: f64) -> Result<Self> {
        Self::from_linear(10f64.powf(snr_db / 10.0))
    }

    pub fn with_diversity(mut self, f: u32) -> Result<Self> {
        if f == 0 {
            return Err(Error::InvalidConfig("intra-round diversity must be >= 1".into()));
        }
        self.intra_round_diversity = f;
        Ok(self)
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr.log10()
    }

    pub fn intra_round_diversity(&self) -> u32 {
        self.intra_round_diversity
    }
}

/// Ergodic capacity `μ = log2(e)·e^{1/snr}·E1(1/snr)` in bits per symbol.
/// Unaffected by intra-round diversity.
pub fn mean_mutual_info(params: &ChannelParams) -> f64 {
    let x = 1.0 / params.snr;
    LOG2_E * exp_scaled_e1(x).expect("snr > 0 by construction")
}

/// Standard deviation of one block's mutual information.
///
/// Computed as the square root of the central second moment, integrated
/// numerically against the exponential fading law; with `F` sub-channels
/// it shrinks by `√F`.
pub fn std_mutual_info(params: &ChannelParams) -> Result<f64> {
    let var = single_channel_variance(params.snr)?;
    Ok(var.sqrt() / (params.intra_round_diversity as f64).sqrt())
}

fn single_channel_variance(snr: f64) -> Result<f64> {
    let mu = LOG2_E * exp_scaled_e1(1.0 / snr)?;
    let scale = (1.0 + snr).log2().max(mu).max(1e-300);
    let rule = QuadratureRule::adaptive_simpson(1e-15 * scale * scale);
    let var = integrate_expweighted(
        |x| {
            let d = (snr * x).ln_1p() * LOG2_E - mu;
            d * d
        },
        &rule,
    )?;
    if !(var > 0.0) {
        return Err(Error::NegativeVariance(var));
    }
    Ok(var)
}
