//! Long-term rates of hybrid-ARQ under a fixed outage target.
//!
//! A message is sent at initial rate `R_init` per round and retransmitted
//! for at most `M` rounds. The long-term rate is `R_init / E[X]`, `X` being
//! the number of rounds used. Incremental redundancy (IR) accumulates
//! mutual information across rounds; Chase combining (CC) accumulates SNR.

mod approx;
mod cc;
mod ir;
mod optimize;

pub use approx::{
    early_termination_probability, expected_rounds_approx, gap_ec_ir, ir_rate_gaussian,
    min_rounds_heuristic, truncation_term, HarqGap,
};
pub use cc::{cc_affine, cc_expected_rounds, cc_rate, cc_rate_at, optimize_cc_rate};
pub use ir::{ak_probability, expected_rounds_ir, ir_rate, ir_rate_at, ExpectedRoundsCurve};
pub use optimize::{maximize_on_interval, optimize_initial_rate, OptimizedRate};

use crate::channel::ChannelParams;
use crate::error::{check_probability, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    IncrementalRedundancy,
    ChaseCombining,
}

impl Protocol {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::IncrementalRedundancy => "ir",
            Self::ChaseCombining => "cc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarqConfig {
    protocol: Protocol,
    max_rounds: usize,
    epsilon: f64,
    initial_rate: Option<f64>,
    /// Channel uses per round. Rates are per symbol, so this is metadata.
    symbols_per_round: Option<u32>,
}

impl HarqConfig {
    pub fn new(protocol: Protocol, max_rounds: usize, epsilon: f64) -> Result<Self> {
        if max_rounds == 0 {
            return Err(Error::InvalidConfig("max rounds M must be >= 1".into()));
        }
        check_probability("HarqConfig::epsilon", epsilon)?;
        Ok(Self {
            protocol,
            max_rounds,
            epsilon,
            initial_rate: None,
            symbols_per_round: None,
        })
    }

    pub fn with_initial_rate(mut self, rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidConfig(format!("initial rate must be > 0, got {rate}")));
        }
        self.initial_rate = Some(rate);
        Ok(self)
    }

    pub fn with_symbols_per_round(mut self, symbols: u32) -> Result<Self> {
        if symbols == 0 {
            return Err(Error::InvalidConfig("symbols per round must be >= 1".into()));
        }
        self.symbols_per_round = Some(symbols);
        Ok(self)
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn max_rounds(&self) -> usize {
        self.max_rounds
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn initial_rate(&self) -> Option<f64> {
        self.initial_rate
    }

    pub fn symbols_per_round(&self) -> Option<u32> {
        self.symbols_per_round
    }

    /// Initial rate in effect: the explicit one, else the rate putting the
    /// outage at termination exactly at `ε`.
    pub fn resolve_initial_rate(&self, params: &ChannelParams) -> Result<f64> {
        match self.initial_rate {
            Some(r) => Ok(r),
            None => Ok(self.analyze(params)?.initial_rate),
        }
    }

    /// Analytic performance of this configuration.
    pub fn analyze(&self, params: &ChannelParams) -> Result<HarqAnalysis> {
        match (self.protocol, self.initial_rate) {
            (Protocol::IncrementalRedundancy, None) => ir_rate(params, self.max_rounds, self.epsilon),
            (Protocol::IncrementalRedundancy, Some(r)) => ir_rate_at(params, self.max_rounds, r),
            (Protocol::ChaseCombining, None) => cc_rate(params, self.max_rounds, self.epsilon),
            (Protocol::ChaseCombining, Some(r)) => cc_rate_at(params, self.max_rounds, r),
        }
    }
}

/// Analytic description of one H-ARQ operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct HarqAnalysis {
    pub protocol: Protocol,
    pub max_rounds: usize,
    pub initial_rate: f64,
    /// `E[X] ∈ [1, M]`.
    pub expected_rounds: f64,
    /// `initial_rate / expected_rounds`.
    pub longterm_rate: f64,
    /// Probability that the message is still undecodable after round `M`.
    pub outage_at_termination: f64,
    /// `P[X ≤ k]` for `k = 1..=M`. The last entry is 1: transmission always
    /// stops at round `M`, decoded or not.
    pub per_round_stop_cdf: Vec<f64>,
}

impl HarqAnalysis {
    /// Builds the record from the per-round "still undecoded" probabilities
    /// `P[X > k]`, `k = 1..M−1`.
    pub(crate) fn from_continuation(
        protocol: Protocol,
        initial_rate: f64,
        continuation: &[f64],
        outage_at_termination: f64,
    ) -> Self {
        let max_rounds = continuation.len() + 1;
        // P[X > k] cannot grow with k; grid noise near 1 can make it.
        let continuation: Vec<f64> = continuation
            .iter()
            .scan(1.0f64, |floor, &a| {
                *floor = floor.min(a);
                Some(*floor)
            })
            .collect();
        let expected_rounds = (1.0 + continuation.iter().sum::<f64>()).min(max_rounds as f64);
        let mut per_round_stop_cdf: Vec<f64> = continuation.iter().map(|a| 1.0 - a).collect();
        per_round_stop_cdf.push(1.0);
        Self {
            protocol,
            max_rounds,
            initial_rate,
            expected_rounds,
            longterm_rate: initial_rate / expected_rounds,
            outage_at_termination,
            per_round_stop_cdf,
        }
    }
}
