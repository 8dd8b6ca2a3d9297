//! Message-level Monte Carlo of the H-ARQ protocol.
//!
//! Each message draws fresh i.i.d. fading per round, attempts decoding at
//! the end of every round and stops at the first success or after round
//! `M`. Messages are grouped in fixed batches, each with its own counter-
//! based random stream; batch statistics are integers merged in batch
//! order, so reports are bit-identical for any worker count.

use std::f64::consts::LOG2_E;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::harq::{HarqConfig, Protocol};
use crate::rng::{exp1, stream_rng};

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub channel: ChannelParams,
    pub harq: HarqConfig,
    pub messages: u64,
    pub seed: u64,
    pub batch_size: u64,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
}

pub const DEFAULT_BATCH: u64 = 1 << 14;

impl SimConfig {
    pub fn new(channel: ChannelParams, harq: HarqConfig, messages: u64, seed: u64) -> Result<Self> {
        let config = Self {
            channel,
            harq,
            messages,
            seed,
            batch_size: DEFAULT_BATCH.min(messages.max(1)),
            threads: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_batch_size(mut self, batch_size: u64) -> Result<Self> {
        self.batch_size = batch_size;
        self.validate()?;
        Ok(self)
    }

    pub fn with_threads(mut self, threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::InvalidConfig("thread count must be >= 1".into()));
        }
        self.threads = Some(threads);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.messages == 0 {
            return Err(Error::InvalidConfig("message count N must be >= 1".into()));
        }
        if self.batch_size == 0 || self.batch_size > self.messages {
            return Err(Error::InvalidConfig(format!(
                "batch size must be in [1, N = {}], got {}",
                self.messages, self.batch_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub snr_db: f64,
    pub protocol: Protocol,
    pub max_rounds: usize,
    pub initial_rate: f64,
    pub messages: u64,
    /// `initial_rate / empirical_expected_rounds`.
    pub empirical_rate: f64,
    pub empirical_expected_rounds: f64,
    pub empirical_outage: f64,
    /// `rounds_histogram[m − 1]` counts messages that used `m` rounds.
    pub rounds_histogram: Vec<u64>,
    /// Delta-method standard error of the rate.
    pub stderr_rate: f64,
    pub ci95_rate: f64,
    /// Wilson 95% interval for the outage probability.
    pub outage_interval: (f64, f64),
    pub ci95_outage: f64,
    pub seed: u64,
}

impl SimReport {
    /// Fraction of messages still undecoded after `k` rounds, `k < M`.
    pub fn continuation_fraction(&self, k: usize) -> f64 {
        let beyond: u64 = self.rounds_histogram[k.min(self.max_rounds)..].iter().sum();
        beyond as f64 / self.messages as f64
    }

    /// Binomial standard error of the outage estimate around `target`.
    pub fn outage_stderr(&self, target: f64) -> f64 {
        (target * (1.0 - target) / self.messages as f64).sqrt()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Tally {
    histogram: Vec<u64>,
    outages: u64,
    rounds: u64,
    rounds_sq: u64,
}

impl Tally {
    fn new(max_rounds: usize) -> Self {
        Self {
            histogram: vec![0; max_rounds],
            ..Self::default()
        }
    }

    fn record(&mut self, rounds: usize, outage: bool) {
        self.histogram[rounds - 1] += 1;
        self.outages += outage as u64;
        self.rounds += rounds as u64;
        self.rounds_sq += (rounds * rounds) as u64;
    }

    fn merge(&mut self, other: &Tally) {
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self.outages += other.outages;
        self.rounds += other.rounds;
        self.rounds_sq += other.rounds_sq;
    }
}

/// Outcome of one message: rounds used, outage flag and the channel gains
/// `|h|²` it saw (round-major, `F` per round).
#[derive(Debug, Clone, PartialEq)]
pub struct MessageTrace {
    pub rounds: usize,
    pub outage: bool,
    pub gains: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Protocol_ {
    protocol: Protocol,
    max_rounds: usize,
    snr: f64,
    subchannels: usize,
    r_init: f64,
}

impl Protocol_ {
    /// Runs one message. Gains are appended to `gains` (cleared first).
    fn run<R: Rng>(&self, rng: &mut R, gains: &mut Vec<f64>, combined: &mut [f64]) -> (usize, bool) {
        gains.clear();
        combined.iter_mut().for_each(|g| *g = 0.0);
        let f = self.subchannels as f64;
        let mut info = 0.0;
        for m in 1..=self.max_rounds {
            let metric = match self.protocol {
                Protocol::IncrementalRedundancy => {
                    let mut round = 0.0;
                    for _ in 0..self.subchannels {
                        let g = exp1(rng);
                        gains.push(g);
                        round += (self.snr * g).ln_1p();
                    }
                    info += round * LOG2_E / f;
                    info
                }
                Protocol::ChaseCombining => {
                    let mut total = 0.0;
                    for c in combined.iter_mut() {
                        let g = exp1(rng);
                        gains.push(g);
                        *c += g;
                        total += (self.snr * *c).ln_1p();
                    }
                    total * LOG2_E / f
                }
            };
            // Decoding needs strictly more information than the rate.
            if metric > self.r_init {
                return (m, false);
            }
        }
        (self.max_rounds, true)
    }
}

fn resolve(config: &SimConfig) -> Result<Protocol_> {
    let r_init = config.harq.resolve_initial_rate(&config.channel)?;
    Ok(Protocol_ {
        protocol: config.harq.protocol(),
        max_rounds: config.harq.max_rounds(),
        snr: config.channel.snr(),
        subchannels: config.channel.intra_round_diversity() as usize,
        r_init,
    })
}

fn run_batch(p: &Protocol_, seed: u64, batch: u64, count: u64) -> Tally {
    let mut rng = stream_rng(seed, batch);
    let mut tally = Tally::new(p.max_rounds);
    let mut gains = Vec::with_capacity(p.max_rounds * p.subchannels);
    let mut combined = vec![0.0; p.subchannels];
    for _ in 0..count {
        let (rounds, outage) = p.run(&mut rng, &mut gains, &mut combined);
        tally.record(rounds, outage);
    }
    tally
}

/// Runs the protocol for `config.messages` messages.
pub fn simulate(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let p = resolve(config)?;
    let n = config.messages;
    let batches = n.div_ceil(config.batch_size);
    let work = || {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let count = config.batch_size.min(n - b * config.batch_size);
                run_batch(&p, config.seed, b, count)
            })
            .collect::<Vec<Tally>>()
    };
    let tallies = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut total = Tally::new(p.max_rounds);
    for t in &tallies {
        total.merge(t);
    }
    Ok(report(config, &p, &total))
}

fn report(config: &SimConfig, p: &Protocol_, t: &Tally) -> SimReport {
    let n = config.messages as f64;
    let mean_x = t.rounds as f64 / n;
    let var_x = if config.messages > 1 {
        ((t.rounds_sq as f64 - n * mean_x * mean_x) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let stderr_rate = p.r_init * var_x.sqrt() / (mean_x * mean_x * n.sqrt());
    let outage = t.outages as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (outage + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (outage * (1.0 - outage) / n + z2 / (4.0 * n * n)).sqrt();
    SimReport {
        snr_db: config.channel.snr_db(),
        protocol: p.protocol,
        max_rounds: p.max_rounds,
        initial_rate: p.r_init,
        messages: config.messages,
        empirical_rate: p.r_init / mean_x,
        empirical_expected_rounds: mean_x,
        empirical_outage: outage,
        rounds_histogram: t.histogram.clone(),
        stderr_rate,
        ci95_rate: Z95 * stderr_rate,
        outage_interval: ((center - half).max(0.0), (center + half).min(1.0)),
        ci95_outage: half,
        seed: config.seed,
    }
}

/// Replays the first `count` messages of the first batch and returns their
/// full traces. The draws are the ones [`simulate`] uses.
pub fn trace_messages(config: &SimConfig, count: usize) -> Result<Vec<MessageTrace>> {
    config.validate()?;
    let p = resolve(config)?;
    let mut rng = stream_rng(config.seed, 0);
    let mut gains = Vec::new();
    let mut combined = vec![0.0; p.subchannels];
    Ok((0..count)
        .map(|_| {
            let (rounds, outage) = p.run(&mut rng, &mut gains, &mut combined);
            MessageTrace {
                rounds,
                outage,
                gains: gains.clone(),
            }
        })
        .collect())
}

/// One report per SNR point (dB). Every point reuses `base.seed`, so the
/// sweep sees common random numbers and its reports do not depend on grid
/// order. An explicit initial rate in `base` is kept at every point;
/// otherwise it is re-derived per SNR.
pub fn simulate_sweep(base: &SimConfig, snr_grid_db: &[f64]) -> Result<Vec<SimReport>> {
    if snr_grid_db.is_empty() {
        return Err(Error::InvalidConfig("SNR grid is empty".into()));
    }
    snr_grid_db
        .iter()
        .map(|&db| {
            let channel = ChannelParams::from_db(db)?
                .with_diversity(base.channel.intra_round_diversity())?;
            simulate(&SimConfig { channel, ..*base })
        })
        .collect()
}
