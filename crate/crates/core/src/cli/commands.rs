//! Row builders for the analytic and simulation commands.

use rayon::prelude::*;

use super::table::{Cell, Table};
use super::RunSpec;
use crate::channel::{mean_mutual_info, sample_mi_sum, ChannelParams};
use crate::error::Result;
use crate::harq::{
    cc_affine, cc_rate, expected_rounds_approx, ir_rate, ir_rate_gaussian, optimize_cc_rate,
    optimize_initial_rate, HarqAnalysis, HarqConfig, OptimizedRate, Protocol,
};
use crate::outage::{
    affine_approx_capacity, chebyshev_bounds, eps_outage_capacity, gaussian_approx_capacity,
    OutageSpec,
};
use crate::sim::{self, SimConfig, SimReport};

pub(super) const DEFAULT_SNR: &[f64] = &[10.0];
pub(super) const DEFAULT_ROUNDS: &[usize] = &[2];
pub(super) const DEFAULT_EPS: &[f64] = &[0.01];

/// Evaluates `row` at every point in parallel, keeping input order.
pub(super) fn rows<P, F>(points: &[P], row: F) -> Result<Vec<Vec<Cell>>>
where
    P: Sync,
    F: Fn(&P) -> Result<Vec<Cell>> + Sync + Send,
{
    points.par_iter().map(row).collect()
}

/// `(snr_db, count, eps)` triples in row-major order.
pub(super) fn grid3(snr: &[f64], counts: &[usize], eps: &[f64]) -> Vec<(f64, usize, f64)> {
    let mut out = Vec::with_capacity(snr.len() * counts.len() * eps.len());
    for &s in snr {
        for &c in counts {
            for &e in eps {
                out.push((s, c, e));
            }
        }
    }
    out
}

pub(super) fn channel(snr_db: f64) -> Result<ChannelParams> {
    ChannelParams::from_db(snr_db)
}

pub(super) fn c_eps(params: &ChannelParams, diversity: usize, eps: f64) -> Result<f64> {
    Ok(eps_outage_capacity(params, &OutageSpec::new(eps, diversity)?)?.rate)
}

pub(super) fn optimized(protocol: Protocol, params: &ChannelParams, m: usize, eps: f64) -> Result<OptimizedRate> {
    match protocol {
        Protocol::IncrementalRedundancy => optimize_initial_rate(params, m, eps),
        Protocol::ChaseCombining => optimize_cc_rate(params, m, eps),
    }
}

fn optimized_header(optimize: bool) -> Vec<&'static str> {
    if optimize {
        vec!["r_opt", "rate_opt", "opt_at_endpoint"]
    } else {
        Vec::new()
    }
}

fn optimized_cells(opt: &OptimizedRate) -> [Cell; 3] {
    [opt.r_opt.into(), opt.rate_opt.into(), opt.at_endpoint.into()]
}

fn analysis_cells(a: &HarqAnalysis) -> [Cell; 5] {
    [
        a.protocol.tag().into(),
        a.initial_rate.into(),
        a.expected_rounds.into(),
        a.longterm_rate.into(),
        a.outage_at_termination.into(),
    ]
}

const ANALYSIS_HEADER: [&str; 5] = ["protocol", "initial_rate", "expected_rounds", "rate", "outage"];

pub fn capacity(spec: &RunSpec) -> Result<Table> {
    let snr = spec.snr_or(DEFAULT_SNR);
    let points = grid3(&snr, &spec.diversity_or(&[1]), &spec.eps_or(DEFAULT_EPS));
    let mut header = vec![
        "snr_db", "snr_linear", "L", "eps", "ergodic", "exact", "gaussian_approx", "gaussian_negative",
        "affine_approx", "affine_negative", "chebyshev_lower", "chebyshev_lower_negative", "chebyshev_upper",
    ];
    if spec.samples.is_some() {
        header.extend(["mc_exact", "mc_samples"]);
    }
    let mut table = Table::new(header);
    table.extend(rows(&points, |&(db, l, eps)| {
        let params = channel(db)?;
        let out = OutageSpec::new(eps, l)?;
        let gauss = gaussian_approx_capacity(&params, &out)?;
        let affine = affine_approx_capacity(&params, &out)?;
        let (lo, hi) = chebyshev_bounds(&params, &out)?;
        let mut row: Vec<Cell> = vec![
            db.into(),
            params.snr().into(),
            l.into(),
            eps.into(),
            mean_mutual_info(&params).into(),
            eps_outage_capacity(&params, &out)?.rate.into(),
            gauss.rate.into(),
            gauss.negative.into(),
            affine.rate.into(),
            affine.negative.into(),
            lo.into(),
            (lo < 0.0).into(),
            hi.into(),
        ];
        if let Some(n) = spec.samples {
            let draws = sample_mi_sum(&params, l, n, spec.seed)?;
            row.push((draws.quantile(eps)? / l as f64).into());
            row.push(n.into());
        }
        Ok(row)
    })?);
    Ok(table)
}

pub fn harq_ir(spec: &RunSpec) -> Result<Table> {
    let points = grid3(&spec.snr_or(DEFAULT_SNR), &spec.rounds_or(DEFAULT_ROUNDS), &spec.eps_or(DEFAULT_EPS));
    let mut header = vec!["snr_db", "snr_linear", "M", "eps"];
    header.extend(ANALYSIS_HEADER);
    header.extend(["c_eps", "ergodic", "gaussian_rate", "gaussian_negative", "expected_rounds_approx"]);
    header.extend(optimized_header(spec.optimize));
    let mut table = Table::new(header);
    table.extend(rows(&points, |&(db, m, eps)| {
        let params = channel(db)?;
        let a = ir_rate(&params, m, eps)?;
        let gauss = ir_rate_gaussian(&params, m, eps)?;
        let mut row: Vec<Cell> = vec![db.into(), params.snr().into(), m.into(), eps.into()];
        row.extend(analysis_cells(&a));
        row.extend([
            c_eps(&params, m, eps)?.into(),
            mean_mutual_info(&params).into(),
            gauss.into(),
            (gauss < 0.0).into(),
            expected_rounds_approx(&params, m, eps)?.into(),
        ]);
        if spec.optimize {
            row.extend(optimized_cells(&optimize_initial_rate(&params, m, eps)?));
        }
        Ok(row)
    })?);
    Ok(table)
}

pub fn harq_cc(spec: &RunSpec) -> Result<Table> {
    let points = grid3(&spec.snr_or(DEFAULT_SNR), &spec.rounds_or(DEFAULT_ROUNDS), &spec.eps_or(DEFAULT_EPS));
    let mut header = vec!["snr_db", "snr_linear", "M", "eps"];
    header.extend(ANALYSIS_HEADER);
    header.extend(["c_eps", "prelog", "offset", "affine_rate"]);
    header.extend(optimized_header(spec.optimize));
    let mut table = Table::new(header);
    table.extend(rows(&points, |&(db, m, eps)| {
        let params = channel(db)?;
        let a = cc_rate(&params, m, eps)?;
        let (prelog, offset) = cc_affine(&params, m, eps)?;
        let mut row: Vec<Cell> = vec![db.into(), params.snr().into(), m.into(), eps.into()];
        row.extend(analysis_cells(&a));
        row.extend([
            c_eps(&params, m, eps)?.into(),
            prelog.into(),
            offset.into(),
            (prelog * params.snr().log2() + offset).into(),
        ]);
        if spec.optimize {
            row.extend(optimized_cells(&optimize_cc_rate(&params, m, eps)?));
        }
        Ok(row)
    })?);
    Ok(table)
}

pub fn optimize(spec: &RunSpec) -> Result<Table> {
    let points = grid3(&spec.snr_or(DEFAULT_SNR), &spec.rounds_or(DEFAULT_ROUNDS), &spec.eps_or(DEFAULT_EPS));
    let mut table = Table::new([
        "snr_db", "snr_linear", "protocol", "M", "eps", "unoptimized_r", "unoptimized_rate", "r_opt",
        "rate_opt", "gain", "at_endpoint",
    ]);
    table.extend(rows(&points, |&(db, m, eps)| {
        let params = channel(db)?;
        let opt = optimized(spec.protocol, &params, m, eps)?;
        Ok(vec![
            db.into(),
            params.snr().into(),
            spec.protocol.tag().into(),
            m.into(),
            eps.into(),
            opt.unoptimized_r.into(),
            opt.unoptimized_rate.into(),
            opt.r_opt.into(),
            opt.rate_opt.into(),
            opt.gain().into(),
            opt.at_endpoint.into(),
        ])
    })?);
    Ok(table)
}

const SIM_HEADER: [&str; 15] = [
    "snr_db", "snr_linear", "protocol", "M", "eps", "seed", "messages", "initial_rate", "sim_rate",
    "sim_stderr_rate", "sim_ci95_rate", "sim_expected_rounds", "sim_outage", "sim_outage_lo", "sim_outage_hi",
];

fn sim_config(spec: &RunSpec, params: ChannelParams, m: usize, eps: f64) -> Result<SimConfig> {
    let mut harq = HarqConfig::new(spec.protocol, m, eps)?;
    if let Some(r) = spec.initial_rate {
        harq = harq.with_initial_rate(r)?;
    }
    SimConfig::new(params, harq, spec.messages.unwrap_or(100_000), spec.seed)
}

fn sim_cells(db: f64, params: &ChannelParams, eps: f64, r: &SimReport) -> Vec<Cell> {
    vec![
        db.into(),
        params.snr().into(),
        r.protocol.tag().into(),
        r.max_rounds.into(),
        eps.into(),
        r.seed.into(),
        r.messages.into(),
        r.initial_rate.into(),
        r.empirical_rate.into(),
        r.stderr_rate.into(),
        r.ci95_rate.into(),
        r.empirical_expected_rounds.into(),
        r.empirical_outage.into(),
        r.outage_interval.0.into(),
        r.outage_interval.1.into(),
    ]
}

/// Every grid point reuses the same seed, so neighbouring points are
/// driven by common random numbers.
pub fn simulate(spec: &RunSpec) -> Result<Table> {
    let points = grid3(&spec.snr_or(DEFAULT_SNR), &spec.rounds_or(DEFAULT_ROUNDS), &spec.eps_or(DEFAULT_EPS));
    let mut table = Table::new(SIM_HEADER);
    table.extend(rows(&points, |&(db, m, eps)| {
        let params = channel(db)?;
        let report = sim::simulate(&sim_config(spec, params, m, eps)?)?;
        Ok(sim_cells(db, &params, eps, &report))
    })?);
    Ok(table)
}

/// Standardised difference, 0 when both sides agree exactly.
pub(super) fn z_score(observed: f64, expected: f64, stderr: f64) -> f64 {
    let diff = observed - expected;
    if diff == 0.0 {
        0.0
    } else {
        diff / stderr
    }
}

pub fn compare(spec: &RunSpec) -> Result<Table> {
    let points = grid3(&spec.snr_or(DEFAULT_SNR), &spec.rounds_or(DEFAULT_ROUNDS), &spec.eps_or(DEFAULT_EPS));
    let mut header = SIM_HEADER.to_vec();
    header.extend(["analytic_rate", "analytic_expected_rounds", "analytic_outage", "z_rate", "z_outage"]);
    let mut table = Table::new(header);
    table.extend(rows(&points, |&(db, m, eps)| {
        let params = channel(db)?;
        let config = sim_config(spec, params, m, eps)?;
        let analytic = config.harq.analyze(&params)?;
        let report = sim::simulate(&config)?;
        let a_out = analytic.outage_at_termination;
        let mut row = sim_cells(db, &params, eps, &report);
        row.extend([
            analytic.longterm_rate.into(),
            analytic.expected_rounds.into(),
            a_out.into(),
            z_score(report.empirical_rate, analytic.longterm_rate, report.stderr_rate).into(),
            z_score(report.empirical_outage, a_out, report.outage_stderr(a_out)).into(),
        ]);
        Ok(row)
    })?);
    Ok(table)
}
