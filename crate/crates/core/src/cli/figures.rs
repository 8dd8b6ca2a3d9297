//! Figure presets. Each one fixes default grids matching the original plot
//! and reuses the same library calls as the individual commands; any grid
//! flag given on the command line overrides its default.
//!
//! | n  | content                                          | default grid                      |
//! |----|--------------------------------------------------|-----------------------------------|
//! | 1  | high-SNR offset vs L                             | L = 1..20, snr 60 dB, ε = 0.01    |
//! | 2  | CDF of averaged mutual information               | L ∈ {2,10}, snr ∈ {0,10,20}       |
//! | 3  | C_ε^L with Gaussian and affine approximations    | L ∈ {3,10}, snr 0:40:1            |
//! | 4  | ergodic minus ε-outage capacity vs L             | L 1..64, snr 20, ε ∈ {0.01,0.05}  |
//! | 5  | ergodic, IR and fixed-length rates vs SNR        | M ∈ {1,2,6}, snr 0:40:1           |
//! | 6  | ergodic gap with and without IR vs M             | M 1..100, snr 10                  |
//! | 7  | CDF of accumulated mutual information            | rounds ∈ {2,3}, snr ∈ {10,40}     |
//! | 8  | IR rate vs initial rate                          | M ∈ {2,3,4}, snr ∈ {10,30}        |
//! | 9  | optimised vs unoptimised IR rate                 | M ∈ {2,6}, snr 0:60:1             |
//! | 10 | IR and fixed-length rates vs ε                   | M = 5, snr ∈ {0,10,20}            |
//! | 11 | optimised IR vs optimised CC                     | M ∈ {2,4}, snr 0:40:1             |
//!
//! ε defaults to 0.01 unless noted.

use super::commands::{c_eps, channel, grid3, optimized, rows, z_score};
use super::table::{Cell, Table};
use super::RunSpec;
use crate::channel::{
    gaussian_sum_cdf, log_fading_quantile, mean_mutual_info, ChannelParams, MutualInfoDist, SumMode,
};
use crate::error::{Error, Result};
use crate::harq::{
    gap_ec_ir, ir_rate, ExpectedRoundsCurve, HarqConfig, Protocol,
};
use crate::outage::{affine_approx_capacity, gap_ec_fd, gaussian_approx_capacity, OutageSpec};
use crate::sim::{simulate, SimConfig};

const EPS: &[f64] = &[0.01];
/// Presets whose columns are laid out for one ε.
pub(super) const SINGLE_EPS: [u8; 5] = [3, 5, 8, 9, 11];
/// Abscissae per curve in the CDF and rate-vs-R_init figures.
const CURVE_POINTS: usize = 201;

fn sweep_db(start: f64, stop: f64) -> Vec<f64> {
    (0..=((stop - start) as usize)).map(|i| start + i as f64).collect()
}

pub fn figure(n: u8, spec: &RunSpec) -> Result<Table> {
    match n {
        1 => offset_vs_l(spec),
        2 => averaged_cdf(spec),
        3 => capacity_approximations(spec),
        4 => gap_vs_l(spec),
        5 => rates_vs_snr(spec),
        6 => gap_vs_m(spec),
        7 => accumulated_cdf(spec),
        8 => rate_vs_initial_rate(spec),
        9 => optimized_vs_unoptimized(spec),
        10 => rates_vs_eps(spec),
        11 => ir_vs_cc(spec),
        _ => Err(Error::InvalidConfig(format!("no figure preset {n}"))),
    }
}

fn offset_vs_l(spec: &RunSpec) -> Result<Table> {
    let l: Vec<usize> = (1..=20).collect();
    let points = grid3(&spec.snr_or(&[60.0]), &spec.diversity_or(&l), &spec.eps_or(EPS));
    let mut table = Table::new(["snr_db", "L", "eps", "offset", "offset_at_snr"]);
    table.extend(rows(&points, |&(db, l, eps)| {
        let params = channel(db)?;
        Ok(vec![
            db.into(),
            l.into(),
            eps.into(),
            (-log_fading_quantile(l, eps)?).into(),
            (params.snr().log2() - c_eps(&params, l, eps)?).into(),
        ])
    })?);
    Ok(table)
}

/// `CURVE_POINTS` abscissae spanning the central 99.8% of `law`.
fn abscissae(law: &MutualInfoDist) -> Result<Vec<f64>> {
    let (lo, hi) = (law.quantile(1e-3)?, law.quantile(1.0 - 1e-3)?);
    let step = (hi - lo) / (CURVE_POINTS - 1) as f64;
    Ok((0..CURVE_POINTS).map(|i| lo + i as f64 * step).collect())
}

fn averaged_cdf(spec: &RunSpec) -> Result<Table> {
    let points = grid3(&spec.snr_or(&[0.0, 10.0, 20.0]), &spec.diversity_or(&[2, 10]), &[0.0]);
    let curves = rows(&points, |&(db, l, _)| {
        let params = channel(db)?;
        let law = MutualInfoDist::exact(&params, l, SumMode::Average)?;
        let mut cells = Vec::with_capacity(CURVE_POINTS * 5);
        for x in abscissae(&law)? {
            cells.extend::<[Cell; 5]>([
                db.into(),
                l.into(),
                x.into(),
                law.cdf(x).into(),
                gaussian_sum_cdf(&params, l, x * l as f64)?.into(),
            ]);
        }
        Ok(cells)
    })?;
    let mut table = Table::new(["snr_db", "L", "x", "cdf_exact", "cdf_gaussian"]);
    for curve in curves {
        table.extend(curve.chunks(5).map(<[Cell]>::to_vec));
    }
    Ok(table)
}

fn capacity_approximations(spec: &RunSpec) -> Result<Table> {
    let l = spec.diversity_or(&[3, 10]);
    let eps = single(spec.eps_or(EPS), "eps")?;
    let mut header = vec!["snr_db".to_string()];
    for v in &l {
        header.extend([format!("c_eps_{v}"), format!("gauss_{v}"), format!("gauss_negative_{v}"), format!("affine_{v}")]);
    }
    let mut table = Table::new(header);
    table.extend(rows(&spec.snr_or(&sweep_db(0.0, 40.0)), |&db| {
        let params = channel(db)?;
        let mut row: Vec<Cell> = vec![db.into()];
        for &v in &l {
            let out = OutageSpec::new(eps, v)?;
            let gauss = gaussian_approx_capacity(&params, &out)?;
            row.extend([
                c_eps(&params, v, eps)?.into(),
                gauss.rate.into(),
                gauss.negative.into(),
                affine_approx_capacity(&params, &out)?.rate.into(),
            ]);
        }
        Ok(row)
    })?);
    Ok(table)
}

fn gap_vs_l(spec: &RunSpec) -> Result<Table> {
    let l: Vec<usize> = (1..=64).collect();
    let points = grid3(&spec.snr_or(&[20.0]), &spec.diversity_or(&l), &spec.eps_or(&[0.01, 0.05]));
    let mut table = Table::new(["snr_db", "L", "eps", "gap_exact", "gap_approx"]);
    table.extend(rows(&points, |&(db, l, eps)| {
        let gap = gap_ec_fd(&channel(db)?, &OutageSpec::new(eps, l)?)?;
        Ok(vec![db.into(), l.into(), eps.into(), gap.exact.into(), gap.approx.into()])
    })?);
    Ok(table)
}

fn rates_vs_snr(spec: &RunSpec) -> Result<Table> {
    let m = spec.rounds_or(&[1, 2, 6]);
    let eps = single(spec.eps_or(EPS), "eps")?;
    let harq_m: Vec<usize> = m.iter().copied().filter(|&v| v >= 2).collect();
    let mut header = vec!["snr_db".to_string(), "ergodic".to_string()];
    header.extend(harq_m.iter().map(|v| format!("c_ir_{v}")));
    header.extend(m.iter().map(|v| format!("c_eps_{v}")));
    if spec.messages.is_some() {
        for v in &harq_m {
            header.extend([format!("sim_ir_{v}"), format!("sim_ir_{v}_ci95"), format!("sim_ir_{v}_z")]);
        }
    }
    let mut table = Table::new(header);
    table.extend(rows(&spec.snr_or(&sweep_db(0.0, 40.0)), |&db| {
        let params = channel(db)?;
        let mut row: Vec<Cell> = vec![db.into(), mean_mutual_info(&params).into()];
        let mut analytic = Vec::with_capacity(harq_m.len());
        for &v in &harq_m {
            let rate = ir_rate(&params, v, eps)?.longterm_rate;
            analytic.push(rate);
            row.push(rate.into());
        }
        for &v in &m {
            row.push(c_eps(&params, v, eps)?.into());
        }
        if let Some(n) = spec.messages {
            for (&v, &rate) in harq_m.iter().zip(&analytic) {
                let harq = HarqConfig::new(Protocol::IncrementalRedundancy, v, eps)?;
                let r = simulate(&SimConfig::new(params, harq, n, spec.seed)?)?;
                row.extend([
                    r.empirical_rate.into(),
                    r.ci95_rate.into(),
                    z_score(r.empirical_rate, rate, r.stderr_rate).into(),
                ]);
            }
        }
        Ok(row)
    })?);
    Ok(table)
}

fn gap_vs_m(spec: &RunSpec) -> Result<Table> {
    let m: Vec<usize> = (1..=100).collect();
    let points = grid3(&spec.snr_or(&[10.0]), &spec.rounds_or(&m), &spec.eps_or(EPS));
    let mut table = Table::new([
        "snr_db", "M", "eps", "gap_ir_exact", "gap_ir_approx_ratio", "gap_ir_approx_leading", "gap_fd_exact",
        "gap_fd_approx",
    ]);
    table.extend(rows(&points, |&(db, m, eps)| {
        let params = channel(db)?;
        let ir = gap_ec_ir(&params, m, eps)?;
        let fd = gap_ec_fd(&params, &OutageSpec::new(eps, m)?)?;
        Ok(vec![
            db.into(),
            m.into(),
            eps.into(),
            ir.exact.into(),
            ir.approx_ratio.into(),
            ir.approx_leading.into(),
            fd.exact.into(),
            fd.approx.into(),
        ])
    })?);
    Ok(table)
}

fn accumulated_cdf(spec: &RunSpec) -> Result<Table> {
    let snr = spec.snr_or(&[10.0, 40.0]);
    let rounds = spec.rounds_or(&[2, 3]);
    let per_snr = rows(&snr, |&db| {
        let params = channel(db)?;
        let laws = rounds
            .iter()
            .map(|&k| MutualInfoDist::exact(&params, k, SumMode::Sum))
            .collect::<Result<Vec<_>>>()?;
        // One shared abscissa grid per SNR so the curves can be overlaid.
        let lo = laws.iter().map(|l| l.quantile(1e-3)).collect::<Result<Vec<_>>>()?;
        let hi = laws.iter().map(|l| l.quantile(1.0 - 1e-3)).collect::<Result<Vec<_>>>()?;
        let lo = lo.into_iter().fold(f64::INFINITY, f64::min);
        let hi = hi.into_iter().fold(f64::NEG_INFINITY, f64::max);
        let step = (hi - lo) / (CURVE_POINTS - 1) as f64;
        let mut cells = Vec::new();
        for (law, &k) in laws.iter().zip(&rounds) {
            for i in 0..CURVE_POINTS {
                let x = lo + i as f64 * step;
                cells.extend::<[Cell; 4]>([db.into(), k.into(), x.into(), law.cdf(x).into()]);
            }
        }
        Ok(cells)
    })?;
    let mut table = Table::new(["snr_db", "rounds", "x", "cdf"]);
    for cells in per_snr {
        table.extend(cells.chunks(4).map(<[Cell]>::to_vec));
    }
    Ok(table)
}

fn rate_vs_initial_rate(spec: &RunSpec) -> Result<Table> {
    let eps = single(spec.eps_or(EPS), "eps")?;
    let points = grid3(&spec.snr_or(&[10.0, 30.0]), &spec.rounds_or(&[2, 3, 4]), &[eps]);
    let curves = rows(&points, |&(db, m, eps)| {
        let params = channel(db)?;
        let r_max = ir_rate(&params, m, eps)?.initial_rate;
        let curve = ExpectedRoundsCurve::build(&params, m, r_max)?;
        let mut cells = Vec::with_capacity(CURVE_POINTS * 5);
        for i in 1..=CURVE_POINTS {
            let r = r_max * i as f64 / CURVE_POINTS as f64;
            cells.extend::<[Cell; 5]>([db.into(), m.into(), eps.into(), r.into(), curve.rate(r).into()]);
        }
        Ok(cells)
    })?;
    let mut table = Table::new(["snr_db", "M", "eps", "r_init", "rate"]);
    for curve in curves {
        table.extend(curve.chunks(5).map(<[Cell]>::to_vec));
    }
    Ok(table)
}

fn optimized_vs_unoptimized(spec: &RunSpec) -> Result<Table> {
    let m = spec.rounds_or(&[2, 6]);
    let eps = single(spec.eps_or(EPS), "eps")?;
    let mut header = vec!["snr_db".to_string()];
    for v in &m {
        header.extend([format!("c_eps_{v}"), format!("c_ir_{v}"), format!("c_ir_opt_{v}")]);
    }
    let mut table = Table::new(header);
    table.extend(rows(&spec.snr_or(&sweep_db(0.0, 60.0)), |&db| {
        let params = channel(db)?;
        let mut row: Vec<Cell> = vec![db.into()];
        for &v in &m {
            let opt = optimized(Protocol::IncrementalRedundancy, &params, v, eps)?;
            row.extend([c_eps(&params, v, eps)?.into(), opt.unoptimized_rate.into(), opt.rate_opt.into()]);
        }
        Ok(row)
    })?);
    Ok(table)
}

fn rates_vs_eps(spec: &RunSpec) -> Result<Table> {
    let eps = spec.eps_or(&[0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5]);
    let points = grid3(&spec.snr_or(&[0.0, 10.0, 20.0]), &spec.rounds_or(&[5]), &eps);
    let mut table = Table::new(["snr_db", "M", "eps", "c_ir", "c_eps"]);
    table.extend(rows(&points, |&(db, m, eps)| {
        let params = channel(db)?;
        Ok(vec![
            db.into(),
            m.into(),
            eps.into(),
            ir_rate(&params, m, eps)?.longterm_rate.into(),
            c_eps(&params, m, eps)?.into(),
        ])
    })?);
    Ok(table)
}

fn ir_vs_cc(spec: &RunSpec) -> Result<Table> {
    let m = spec.rounds_or(&[2, 4]);
    let eps = single(spec.eps_or(EPS), "eps")?;
    let mut header = vec!["snr_db".to_string()];
    for v in &m {
        header.extend([format!("c_ir_opt_{v}"), format!("c_cc_opt_{v}")]);
    }
    let mut table = Table::new(header);
    table.extend(rows(&spec.snr_or(&sweep_db(0.0, 40.0)), |&db| {
        let params: ChannelParams = channel(db)?;
        let mut row: Vec<Cell> = vec![db.into()];
        for &v in &m {
            row.push(optimized(Protocol::IncrementalRedundancy, &params, v, eps)?.rate_opt.into());
            row.push(optimized(Protocol::ChaseCombining, &params, v, eps)?.rate_opt.into());
        }
        Ok(row)
    })?);
    Ok(table)
}

/// Figures whose columns are per-ε take exactly one ε.
fn single(values: Vec<f64>, flag: &str) -> Result<f64> {
    match values.as_slice() {
        [v] => Ok(*v),
        _ => Err(Error::InvalidConfig(format!("this figure takes a single --{flag} value"))),
    }
}
