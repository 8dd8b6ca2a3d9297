//! Exit criteria. Runs every check at its pinned tolerance, prints one
//! PASS/FAIL line each and exits non-zero if any fails.

use std::f64::consts::{LN_2, LOG2_E, PI};
use std::time::Instant;

use harq_outage::channel::{log_fading_quantile, std_mutual_info, ChannelParams};
use harq_outage::harq::{
    cc_rate, expected_rounds_approx, gap_ec_ir, ir_rate, optimize_initial_rate, HarqConfig, Protocol,
};
use harq_outage::outage::{chebyshev_bounds, eps_outage_capacity, gap_ec_fd, OutageSpec};
use harq_outage::sim::{simulate, SimConfig};

type Outcome = Result<(bool, String), harq_outage::error::Error>;
type Check = fn() -> Outcome;

fn db(v: f64) -> ChannelParams {
    ChannelParams::from_db(v).expect("valid snr")
}

fn c_eps(params: &ChannelParams, l: usize, eps: f64) -> harq_outage::error::Result<f64> {
    Ok(eps_outage_capacity(params, &OutageSpec::new(eps, l)?)?.rate)
}

/// Least-squares slope of `y` on `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn log_log_slope(x: &[usize], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|&v| (v as f64).ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    slope(&lx, &ly)
}

fn closed_form_anchor() -> Outcome {
    let expected = (1.0 + 10.0 * (1.0f64 / 0.99).ln()).log2();
    let got = c_eps(&ChannelParams::from_linear(10.0)?, 1, 0.01)?;
    let pass = (got - 0.13816).abs() <= 1e-4 && (got - expected).abs() <= 1e-4;
    Ok((pass, format!("C = {got:.6}, closed form {expected:.6}, tol 1e-4")))
}

fn high_snr_sigma() -> Outcome {
    let target = PI * LOG2_E / 6f64.sqrt();
    let got = std_mutual_info(&db(60.0))?;
    let rel = (got - target).abs() / target;
    Ok((rel <= 5e-3, format!("sigma(60 dB) = {got:.6}, limit {target:.6}, rel err {rel:.2e} (tol 5e-3)")))
}

fn offset_limit() -> Outcome {
    let got = log_fading_quantile(1000, 0.01)?;
    Ok(((got + 0.83).abs() <= 0.03, format!("quantile = {got:.4}, target -0.83 ± 0.03")))
}

fn chebyshev_sandwich() -> Outcome {
    let mut worst = String::new();
    let mut count = 0;
    for snr in [0.0, 10.0, 20.0] {
        let params = db(snr);
        for l in 1..=10 {
            for eps in [0.01, 0.05, 0.2] {
                let spec = OutageSpec::new(eps, l)?;
                let (lo, hi) = chebyshev_bounds(&params, &spec)?;
                let c = eps_outage_capacity(&params, &spec)?.rate;
                count += 1;
                if !(lo <= c && c <= hi) {
                    worst = format!("violated at snr {snr} dB, L {l}, eps {eps}: {lo} <= {c} <= {hi}");
                }
            }
        }
    }
    let pass = worst.is_empty();
    Ok((pass, if pass { format!("{count} grid points inside the bounds") } else { worst }))
}

fn gap_scaling_without_harq() -> Outcome {
    let params = db(20.0);
    let ls = [8, 12, 16, 24, 32, 48, 64];
    let mut slopes = Vec::new();
    for eps in [0.01, 0.05] {
        let gaps = ls
            .iter()
            .map(|&l| Ok(gap_ec_fd(&params, &OutageSpec::new(eps, l)?)?.exact))
            .collect::<harq_outage::error::Result<Vec<f64>>>()?;
        slopes.push(log_log_slope(&ls, &gaps));
    }
    let pass = slopes.iter().all(|s| (-0.65..=-0.35).contains(s));
    Ok((pass, format!("slopes eps 0.01 / 0.05 = {:.3} / {:.3}, band [-0.65, -0.35]", slopes[0], slopes[1])))
}

fn gap_scaling_with_harq() -> Outcome {
    let params = db(10.0);
    let ms: Vec<usize> = (10..=100).step_by(10).collect();
    let gaps = ms
        .iter()
        .map(|&m| Ok(gap_ec_ir(&params, m, 0.01)?.exact))
        .collect::<harq_outage::error::Result<Vec<f64>>>()?;
    let s = log_log_slope(&ms, &gaps);
    Ok(((-1.25..=-0.8).contains(&s), format!("slope = {s:.3}, band [-1.25, -0.8]")))
}

fn expected_rounds_expansion() -> Outcome {
    let params = db(10.0);
    let mut worst: f64 = 0.0;
    for m in [20, 50, 100] {
        let exact = ir_rate(&params, m, 0.01)?.expected_rounds;
        worst = worst.max((expected_rounds_approx(&params, m, 0.01)? - exact).abs());
    }
    Ok((worst <= 0.5, format!("max |approx - exact| E[X] = {worst:.4} rounds (tol 0.5)")))
}

fn high_snr_convergence() -> Outcome {
    let (p10, p60) = (db(10.0), db(60.0));
    let a60 = ir_rate(&p60, 2, 0.01)?;
    let d60 = a60.longterm_rate - c_eps(&p60, 2, 0.01)?;
    let d10 = ir_rate(&p10, 2, 0.01)?.longterm_rate - c_eps(&p10, 2, 0.01)?;
    let pass = a60.expected_rounds > 1.95 && d60 < 0.1 * d10;
    Ok((
        pass,
        format!("E[X](60 dB) = {:.6}, gap 60 dB {d60:.3e} vs 10% of {d10:.4}", a60.expected_rounds),
    ))
}

fn chase_combining_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for snr in [0.0, 10.0, 20.0, 30.0, 40.0, 50.0] {
        worst = worst.max((cc_rate(&db(snr), 2, 0.01)?.expected_rounds - 1.1381).abs());
    }
    let grid = [30.0, 35.0, 40.0, 45.0, 50.0];
    let x: Vec<f64> = grid.iter().map(|d| d / 10.0 / LN_2 * 10f64.ln()).collect();
    let y = grid
        .iter()
        .map(|&d| Ok(cc_rate(&db(d), 2, 0.01)?.longterm_rate))
        .collect::<harq_outage::error::Result<Vec<f64>>>()?;
    let s = slope(&x, &y);
    let pass = worst <= 1e-3 && (s - 1.0 / 1.1381).abs() <= 0.02;
    Ok((pass, format!("max |E[X] - 1.1381| = {worst:.2e}, slope {s:.4} vs {:.4}", 1.0 / 1.1381)))
}

fn simulator_matches_analytics() -> Outcome {
    const N: u64 = 1_000_000;
    let eps = 0.01;
    let outage_se = (eps * (1.0 - eps) / N as f64).sqrt();
    let mut failures = Vec::new();
    let mut worst_rate: f64 = 0.0;
    let mut worst_outage: f64 = 0.0;
    let mut seed = 0x5eed;
    for protocol in [Protocol::IncrementalRedundancy, Protocol::ChaseCombining] {
        for m in [2, 4] {
            for snr in [0.0, 10.0, 30.0] {
                seed += 1;
                let params = db(snr);
                let harq = HarqConfig::new(protocol, m, eps)?;
                let analytic = harq.analyze(&params)?;
                let r = simulate(&SimConfig::new(params, harq, N, seed)?)?;
                let z_rate = (r.empirical_rate - analytic.longterm_rate).abs() / r.stderr_rate;
                let z_out = (r.empirical_outage - eps).abs() / outage_se;
                worst_rate = worst_rate.max(z_rate);
                worst_outage = worst_outage.max(z_out);
                if z_rate > 3.0 || z_out > 3.0 {
                    failures.push(format!("{} M={m} {snr} dB (z {z_rate:.2}, {z_out:.2})", protocol.tag()));
                }
            }
        }
    }
    Ok((
        failures.is_empty(),
        format!("12 configs, max |z| rate {worst_rate:.2}, outage {worst_outage:.2} (tol 3) {}", failures.join("; ")),
    ))
}

fn rate_optimization() -> Outcome {
    let p10 = db(10.0);
    let mut endpoint = true;
    for m in [2, 3, 4] {
        endpoint &= optimize_initial_rate(&p10, m, 0.01)?.at_endpoint;
    }
    let o = optimize_initial_rate(&db(30.0), 2, 0.01)?;
    let interior = !o.at_endpoint && o.r_opt < o.unoptimized_r && o.rate_opt > o.unoptimized_rate;
    Ok((
        endpoint && interior,
        format!(
            "10 dB endpoint for M=2,3,4: {endpoint}; 30 dB r_opt {:.3} < {:.3}, rate {:.4} > {:.4}",
            o.r_opt, o.unoptimized_r, o.rate_opt, o.unoptimized_rate
        ),
    ))
}

fn eps_insensitivity() -> Outcome {
    let p = db(10.0);
    let ir = |e| Ok::<_, harq_outage::error::Error>(ir_rate(&p, 5, e)?.longterm_rate);
    let harq_drop = (ir(0.2)? - ir(0.01)?) / ir(0.2)?;
    let fd_drop = (c_eps(&p, 5, 0.2)? - c_eps(&p, 5, 0.01)?) / c_eps(&p, 5, 0.2)?;
    Ok((harq_drop < fd_drop, format!("relative drop with H-ARQ {harq_drop:.4} < without {fd_drop:.4}")))
}

fn determinism() -> Outcome {
    let params = db(10.0);
    let harq = HarqConfig::new(Protocol::IncrementalRedundancy, 4, 0.01)?;
    let base = SimConfig::new(params, harq, 300_000, 99)?.with_batch_size(4096)?;
    let reports = [1, 4, 8]
        .iter()
        .map(|&t| simulate(&base.with_threads(t)?))
        .collect::<harq_outage::error::Result<Vec<_>>>()?;
    let sim_same = reports.windows(2).all(|w| w[0] == w[1]);

    let dir = tempfile::tempdir().expect("temp dir");
    let run = |threads: &str, name: &str, args: &[&str]| {
        let path = dir.path().join(name);
        let mut argv = vec!["harq-outage"];
        argv.extend_from_slice(args);
        argv.extend(["--threads", threads, "--out", path.to_str().expect("utf-8 path")]);
        let status = harq_outage::cli::run(argv);
        (status, std::fs::read(&path).unwrap_or_default())
    };
    let sim_args = ["simulate", "--protocol", "cc", "--M", "2,4", "--snr", "0,10", "--messages", "200000", "--seed", "5"];
    let fig_args = ["figure", "5", "--snr", "0:30:10"];
    let a = run("1", "a.csv", &sim_args);
    let b = run("8", "b.csv", &sim_args);
    let c = run("1", "c.csv", &fig_args);
    let d = run("8", "d.csv", &fig_args);
    let csv_same = a.0 == 0 && c.0 == 0 && !a.1.is_empty() && a == b && c == d;
    Ok((
        sim_same && csv_same,
        format!("reports equal across 1/4/8 threads: {sim_same}; CSV byte-identical across thread counts: {csv_same}"),
    ))
}

fn main() {
    let criteria: [(&str, Check); 13] = [
        ("closed-form L=1 anchor", closed_form_anchor),
        ("high-SNR sigma limit", high_snr_sigma),
        ("offset limit", offset_limit),
        ("Chebyshev sandwich", chebyshev_sandwich),
        ("gap scaling without H-ARQ", gap_scaling_without_harq),
        ("gap scaling with H-ARQ", gap_scaling_with_harq),
        ("expected-rounds expansion", expected_rounds_expansion),
        ("high-SNR convergence of IR to fixed-length", high_snr_convergence),
        ("Chase-combining closed form", chase_combining_closed_form),
        ("simulator vs analytics", simulator_matches_analytics),
        ("initial-rate optimisation", rate_optimization),
        ("outage-target insensitivity", eps_insensitivity),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(outcome) => outcome,
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{tag}] {name}: {detail} ({:.1?})", i + 1, start.elapsed());
        if !pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: {} of {} criteria failed: {failed:?}", failed.len(), criteria.len());
        std::process::exit(1);
    }
}
