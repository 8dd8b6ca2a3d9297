//! Closed-form Gaussian approximations for incremental redundancy.

use super::ir::ir_rate;
use crate::channel::{mean_mutual_info, std_mutual_info, ChannelParams};
use crate::error::{check_probability, Error, Result};
use crate::special::{q_inverse_unchecked, q_tail_integral, q_unchecked};

struct Moments {
    mu: f64,
    sigma: f64,
    q: f64,
}

fn moments(params: &ChannelParams, epsilon: f64) -> Result<Moments> {
    check_probability("harq approximation", epsilon)?;
    Ok(Moments {
        mu: mean_mutual_info(params),
        sigma: std_mutual_info(params)?,
        q: q_inverse_unchecked(epsilon),
    })
}

fn check_rounds(m: usize, min: usize) -> Result<()> {
    if m >= min {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("max rounds M must be >= {min}, got {m}")))
    }
}

/// IR rate with every `A_k` replaced by its normal surrogate:
/// `M[μ − σQ⁻¹(ε)/√M] / (M − Σ_{k<M} Q((M−k)μ/(σ√k) − √(M/k)·Q⁻¹(ε)))`.
pub fn ir_rate_gaussian(params: &ChannelParams, max_rounds: usize, epsilon: f64) -> Result<f64> {
    check_rounds(max_rounds, 1)?;
    let Moments { mu, sigma, q } = moments(params, epsilon)?;
    let m = max_rounds as f64;
    let numerator = m * (mu - sigma / m.sqrt() * q);
    let early: f64 = (1..max_rounds)
        .map(|k| {
            let k = k as f64;
            q_unchecked((m - k) / k.sqrt() * mu / sigma - (m / k).sqrt() * q)
        })
        .sum();
    Ok(numerator / (m - early))
}

/// The truncation correction `(σ/μ)·√M·∫_{Q⁻¹(ε)}^∞ Q(x) dx`.
pub fn truncation_term(params: &ChannelParams, max_rounds: usize, epsilon: f64) -> Result<f64> {
    let Moments { mu, sigma, q } = moments(params, epsilon)?;
    Ok(sigma / mu * (max_rounds as f64).sqrt() * q_tail_integral(q))
}

/// Large-`M` expansion
/// `E[X] ≈ M − (σ/μ)Q⁻¹(ε)√M + 0.5(1−ε) − (σ/μ)√M ∫_{Q⁻¹(ε)}^∞ Q(x) dx`.
pub fn expected_rounds_approx(params: &ChannelParams, max_rounds: usize, epsilon: f64) -> Result<f64> {
    check_rounds(max_rounds, 1)?;
    let Moments { mu, sigma, q } = moments(params, epsilon)?;
    let m = max_rounds as f64;
    let ratio = sigma / mu * m.sqrt();
    Ok(m - ratio * q + 0.5 * (1.0 - epsilon) - ratio * q_tail_integral(q))
}

/// Ergodic-capacity gap with IR, exact and in its two approximate forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarqGap {
    pub exact: f64,
    /// Full ratio built from the `E[X]` expansion.
    pub approx_ratio: f64,
    /// Leading-order `0.5(1−ε)μ/M`.
    pub approx_leading: f64,
}

pub fn gap_ec_ir(params: &ChannelParams, max_rounds: usize, epsilon: f64) -> Result<HarqGap> {
    check_rounds(max_rounds, 1)?;
    let Moments { mu, sigma, q } = moments(params, epsilon)?;
    let m = max_rounds as f64;
    let ratio = sigma / mu * m.sqrt();
    let tail = ratio * q_tail_integral(q);
    let half = 0.5 * (1.0 - epsilon);
    let exact = mu - ir_rate(params, max_rounds, epsilon)?.longterm_rate;
    Ok(HarqGap {
        exact,
        approx_ratio: mu * (half - tail) / (m - ratio * q - tail + half),
        approx_leading: half * mu / m,
    })
}

/// Normal approximation to `P[X ≤ M − 1]`, the chance of finishing early.
pub fn early_termination_probability(params: &ChannelParams, max_rounds: usize, epsilon: f64) -> Result<f64> {
    check_rounds(max_rounds, 2)?;
    let Moments { mu, sigma, q } = moments(params, epsilon)?;
    let m = max_rounds as f64;
    Ok(q_unchecked((mu - m.sqrt() * sigma * q) / (sigma * (m - 1.0).sqrt())))
}

/// Rough minimum `M` for early termination to be likely:
/// `(μ / (σ·Q⁻¹(ε)))²`.
pub fn min_rounds_heuristic(params: &ChannelParams, epsilon: f64) -> Result<f64> {
    let Moments { mu, sigma, q } = moments(params, epsilon)?;
    Ok((mu / (sigma * q)).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outage::{gaussian_approx_capacity, OutageSpec};

    fn at(db: f64) -> ChannelParams {
        ChannelParams::from_db(db).unwrap()
    }

    #[test]
    fn gaussian_rate_single_round() {
        let p = at(10.0);
        let g = ir_rate_gaussian(&p, 1, 0.01).unwrap();
        let c = gaussian_approx_capacity(&p, &OutageSpec::new(0.01, 1).unwrap()).unwrap();
        assert!((g - c.rate).abs() < 1e-12);
    }

    #[test]
    fn tail_integral_anchor() {
        let q = q_inverse_unchecked(0.01);
        let v = q_tail_integral(q);
        assert!((v - 0.003_39).abs() < 2e-5, "{v}");
    }

    #[test]
    fn early_termination_sign_rule() {
        for db in [0.0, 10.0, 20.0, 40.0] {
            let p = at(db);
            for m in [2usize, 4, 16] {
                let prob = early_termination_probability(&p, m, 0.01).unwrap();
                let mu = mean_mutual_info(&p);
                let s = std_mutual_info(&p).unwrap();
                let q = q_inverse_unchecked(0.01);
                assert_eq!(prob > 0.5, mu / s < (m as f64).sqrt() * q);
            }
        }
        assert!(early_termination_probability(&at(10.0), 1, 0.01).is_err());
    }

    #[test]
    fn heuristic_grows_with_snr() {
        let lo = min_rounds_heuristic(&at(10.0), 0.01).unwrap();
        let hi = min_rounds_heuristic(&at(60.0), 0.01).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn leading_gap_formula() {
        let p = at(10.0);
        let g = gap_ec_ir(&p, 10, 0.01).unwrap();
        assert!((g.approx_leading - 0.495 * mean_mutual_info(&p) / 10.0).abs() < 1e-15);
    }
}
