use super::optimize::{maximize_on_interval, OptimizedRate};
use super::{HarqAnalysis, Protocol};
use crate::channel::ChannelParams;
use crate::error::{check_probability, Error, Result};
use crate::special::{erlang_cdf, erlang_quantile};

fn require_single_subchannel(params: &ChannelParams) -> Result<()> {
    if params.intra_round_diversity() == 1 {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "Chase-combining closed forms require intra-round diversity F = 1",
        ))
    }
}

/// `E[X] = M − e^{−t} Σ_{k=1}^{M−1} (M−k) t^{k−1}/(k−1)!` where `t` is the
/// combined-gain threshold `(2^{R_init} − 1)/snr`. Free of SNR.
pub fn cc_expected_rounds(threshold: f64, max_rounds: usize) -> f64 {
    assert!(max_rounds >= 1);
    if threshold <= 0.0 {
        return 1.0;
    }
    let m = max_rounds as f64;
    let mut term = (-threshold).exp();
    let mut sum = 0.0;
    for k in 1..max_rounds {
        if k > 1 {
            term *= threshold / (k - 1) as f64;
        }
        sum += (m - k as f64) * term;
    }
    m - sum
}

fn analysis_at_threshold(params: &ChannelParams, max_rounds: usize, t: f64) -> HarqAnalysis {
    let r_init = (t * params.snr()).ln_1p() / std::f64::consts::LN_2;
    let continuation: Vec<f64> = (1..max_rounds).map(|k| erlang_cdf(t, k as u32)).collect();
    let mut a = HarqAnalysis::from_continuation(
        Protocol::ChaseCombining,
        r_init,
        &continuation,
        erlang_cdf(t, max_rounds as u32),
    );
    // The closed form is the more accurate route to E[X].
    a.expected_rounds = cc_expected_rounds(t, max_rounds);
    a.longterm_rate = a.initial_rate / a.expected_rounds;
    a
}

/// Chase combining with the initial rate set for outage `ε` at round `M`:
/// `R_init = log2(1 + t·snr)`, `t` the `ε`-quantile of `Σ_{i=1}^M |h_i|²`.
pub fn cc_rate(params: &ChannelParams, max_rounds: usize, epsilon: f64) -> Result<HarqAnalysis> {
    check_probability("cc_rate", epsilon)?;
    require_single_subchannel(params)?;
    if max_rounds == 0 {
        return Err(Error::InvalidConfig("max rounds M must be >= 1".into()));
    }
    let t = erlang_quantile(epsilon, max_rounds as u32)?;
    Ok(analysis_at_threshold(params, max_rounds, t))
}

/// Chase-combining operating point at an arbitrary initial rate.
pub fn cc_rate_at(params: &ChannelParams, max_rounds: usize, r_init: f64) -> Result<HarqAnalysis> {
    require_single_subchannel(params)?;
    if max_rounds == 0 {
        return Err(Error::InvalidConfig("max rounds M must be >= 1".into()));
    }
    if !(r_init >= 0.0) || !r_init.is_finite() {
        return Err(Error::Domain {
            function: "cc_rate_at",
            value: r_init,
            expected: "0 <= R_init < inf",
        });
    }
    let t = (r_init * std::f64::consts::LN_2).exp_m1() / params.snr();
    Ok(analysis_at_threshold(params, max_rounds, t))
}

/// High-SNR expansion `(1/E[X])·log2(snr) + log2(t)/E[X]`.
/// Returns `(prelog, offset)`; neither depends on the SNR itself.
pub fn cc_affine(params: &ChannelParams, max_rounds: usize, epsilon: f64) -> Result<(f64, f64)> {
    check_probability("cc_affine", epsilon)?;
    require_single_subchannel(params)?;
    if max_rounds == 0 {
        return Err(Error::InvalidConfig("max rounds M must be >= 1".into()));
    }
    let t = erlang_quantile(epsilon, max_rounds as u32)?;
    let e = cc_expected_rounds(t, max_rounds);
    Ok((1.0 / e, t.log2() / e))
}

/// Maximises `log2(1 + t'·snr) / E[X](t')` over `0 < t' ≤ t_ε`. Searching
/// in `t'` rather than in rate keeps the objective well scaled at high SNR.
pub fn optimize_cc_rate(params: &ChannelParams, max_rounds: usize, epsilon: f64) -> Result<OptimizedRate> {
    let base = cc_rate(params, max_rounds, epsilon)?;
    let t_max = erlang_quantile(epsilon, max_rounds as u32)?;
    let snr = params.snr();
    let objective = |t: f64| (t * snr).ln_1p() / std::f64::consts::LN_2 / cc_expected_rounds(t, max_rounds);
    let best = maximize_on_interval(objective, 0.0, t_max, 2000, 1e-9 * t_max.max(1e-300));
    let r_opt = (best.argument * snr).ln_1p() / std::f64::consts::LN_2;
    let (r_opt, rate_opt, at_endpoint) = if best.value >= base.longterm_rate && !best.at_upper_endpoint {
        (r_opt, best.value, false)
    } else {
        (base.initial_rate, base.longterm_rate, true)
    };
    Ok(OptimizedRate {
        r_opt,
        rate_opt,
        unoptimized_r: base.initial_rate,
        unoptimized_rate: base.longterm_rate,
        at_endpoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(db: f64) -> ChannelParams {
        ChannelParams::from_db(db).unwrap()
    }

    #[test]
    fn closed_form_matches_erlang_sum() {
        for m in 1..=8usize {
            for t in [0.05, 0.7, 3.0, 11.0] {
                let sum: f64 = 1.0 + (1..m).map(|k| erlang_cdf(t, k as u32)).sum::<f64>();
                assert!((cc_expected_rounds(t, m) - sum).abs() < 1e-12, "m={m} t={t}");
            }
        }
    }

    #[test]
    fn single_round_is_single_block_capacity() {
        let p = at(10.0);
        let a = cc_rate(&p, 1, 0.01).unwrap();
        let exact = (1.0 + 10.0 * (1.0f64 / 0.99).ln()).log2();
        assert_eq!(a.expected_rounds, 1.0);
        assert!((a.longterm_rate - exact).abs() < 1e-10);
        assert_eq!(cc_affine(&p, 1, 0.01).unwrap().0, 1.0);
    }

    #[test]
    fn rounds_do_not_depend_on_snr() {
        let a = cc_rate(&at(0.0), 2, 0.01).unwrap();
        let b = cc_rate(&at(30.0), 2, 0.01).unwrap();
        assert!((a.expected_rounds - b.expected_rounds).abs() < 1e-12);
        assert!((a.outage_at_termination - 0.01).abs() < 1e-10);
    }

    #[test]
    fn rate_at_inverts_threshold() {
        let p = at(10.0);
        let a = cc_rate(&p, 3, 0.05).unwrap();
        let b = cc_rate_at(&p, 3, a.initial_rate).unwrap();
        assert!((a.expected_rounds - b.expected_rounds).abs() < 1e-9);
        assert!((b.outage_at_termination - 0.05).abs() < 1e-9);
    }

    #[test]
    fn optimisation_never_loses() {
        for db in [0.0, 10.0, 30.0] {
            let o = optimize_cc_rate(&at(db), 2, 0.01).unwrap();
            assert!(o.rate_opt >= o.unoptimized_rate);
            assert!(o.r_opt <= o.unoptimized_r + 1e-12);
        }
    }

    #[test]
    fn affine_prelog_matches_rate_slope() {
        let (prelog, offset) = cc_affine(&at(0.0), 2, 0.01).unwrap();
        assert!((prelog - 1.0 / 1.1381).abs() < 1e-4);
        let rate = |db| cc_rate(&at(db), 2, 0.01).unwrap().longterm_rate;
        let slope = (rate(40.0) - rate(30.0)) / (1e4f64.log2() - 1e3f64.log2());
        assert!((slope - prelog).abs() < 0.02);
        assert!((rate(50.0) - (prelog * 1e5f64.log2() + offset)).abs() < 1e-3);
    }

    #[test]
    fn diversity_is_rejected() {
        let p = at(10.0).with_diversity(2).unwrap();
        assert!(cc_rate(&p, 2, 0.01).is_err());
        assert!(cc_affine(&p, 2, 0.01).is_err());
    }
}
