//! Fixed-length coding over `L` fading blocks without retransmissions:
//! outage probability, ε-outage capacity and its approximations.

use crate::channel::{
    log_fading_quantile, mean_mutual_info, mi_sum_cdf, mi_sum_quantile, std_mutual_info,
    ChannelParams,
};
use crate::error::{check_probability, Error, Result};
use crate::special::q_inverse_unchecked;

/// Target outage `ε` and diversity order `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageSpec {
    epsilon: f64,
    diversity: usize,
}

impl OutageSpec {
    pub fn new(epsilon: f64, diversity: usize) -> Result<Self> {
        check_probability("OutageSpec::epsilon", epsilon)?;
        if diversity == 0 {
            return Err(Error::InvalidConfig("diversity order L must be >= 1".into()));
        }
        Ok(Self { epsilon, diversity })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn diversity(&self) -> usize {
        self.diversity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CapacityMethod {
    Exact,
    GaussianApprox,
    AffineApprox,
    ChebyshevLower,
    ChebyshevUpper,
}

impl CapacityMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::GaussianApprox => "gaussian_approx",
            Self::AffineApprox => "affine_approx",
            Self::ChebyshevLower => "chebyshev_lower",
            Self::ChebyshevUpper => "chebyshev_upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityResult {
    pub rate: f64,
    pub method: CapacityMethod,
    pub params: ChannelParams,
    pub spec: OutageSpec,
    /// Set when an approximation produced a negative rate. The rate is
    /// reported as computed.
    pub negative: bool,
}

impl CapacityResult {
    fn new(rate: f64, method: CapacityMethod, params: &ChannelParams, spec: &OutageSpec) -> Self {
        Self {
            rate,
            method,
            params: *params,
            spec: *spec,
            negative: rate < 0.0,
        }
    }

    pub fn snr_db(&self) -> f64 {
        self.params.snr_db()
    }

    pub fn snr_linear(&self) -> f64 {
        self.params.snr()
    }
}

/// `P[(1/L) Σ log2(1 + snr|h_i|²) ≤ rate]`.
pub fn outage_probability(params: &ChannelParams, diversity: usize, rate: f64) -> Result<f64> {
    if !(rate >= 0.0) {
        return Err(Error::Domain {
            function: "outage_probability",
            value: rate,
            expected: "rate >= 0",
        });
    }
    mi_sum_cdf(params, diversity, diversity as f64 * rate)
}

/// Largest rate whose outage probability does not exceed `ε`.
pub fn eps_outage_capacity(params: &ChannelParams, spec: &OutageSpec) -> Result<CapacityResult> {
    let l = spec.diversity;
    let rate = mi_sum_quantile(params, l, spec.epsilon)? / l as f64;
    Ok(CapacityResult::new(rate, CapacityMethod::Exact, params, spec))
}

/// `log2(snr) + F_ε⁻¹((1/L) Σ log2|h_i|²)`: unit pre-log plus the
/// fading-dependent offset.
pub fn affine_approx_capacity(params: &ChannelParams, spec: &OutageSpec) -> Result<CapacityResult> {
    let offset = log_fading_quantile(spec.diversity, spec.epsilon)?;
    Ok(CapacityResult::new(
        params.snr().log2() + offset,
        CapacityMethod::AffineApprox,
        params,
        spec,
    ))
}

/// Normal approximation `μ − (σ/√L)·Q⁻¹(ε)`. May go negative at low SNR.
pub fn gaussian_approx_capacity(params: &ChannelParams, spec: &OutageSpec) -> Result<CapacityResult> {
    let mu = mean_mutual_info(params);
    let sigma = std_mutual_info(params)?;
    let rate = mu - sigma / (spec.diversity as f64).sqrt() * q_inverse_unchecked(spec.epsilon);
    Ok(CapacityResult::new(
        rate,
        CapacityMethod::GaussianApprox,
        params,
        spec,
    ))
}

/// Chebyshev sandwich `μ ∓ σ/√(Lε)`, unclamped.
pub fn chebyshev_bounds(params: &ChannelParams, spec: &OutageSpec) -> Result<(f64, f64)> {
    let mu = mean_mutual_info(params);
    let half = std_mutual_info(params)? / (spec.diversity as f64 * spec.epsilon).sqrt();
    Ok((mu - half, mu + half))
}

/// Chebyshev bounds as capacity records; the lower one is clamped at zero.
pub fn chebyshev_results(
    params: &ChannelParams,
    spec: &OutageSpec,
) -> Result<(CapacityResult, CapacityResult)> {
    let (lo, hi) = chebyshev_bounds(params, spec)?;
    Ok((
        CapacityResult::new(lo.max(0.0), CapacityMethod::ChebyshevLower, params, spec),
        CapacityResult::new(hi, CapacityMethod::ChebyshevUpper, params, spec),
    ))
}

/// Ergodic-capacity gap `μ − C_ε^L`, exact and Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityGap {
    pub exact: f64,
    pub approx: f64,
}

pub fn gap_ec_fd(params: &ChannelParams, spec: &OutageSpec) -> Result<CapacityGap> {
    let mu = mean_mutual_info(params);
    let exact = mu - eps_outage_capacity(params, spec)?.rate;
    let approx = std_mutual_info(params)? / (spec.diversity as f64).sqrt()
        * q_inverse_unchecked(spec.epsilon);
    Ok(CapacityGap { exact, approx })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(db: f64) -> ChannelParams {
        ChannelParams::from_db(db).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(OutageSpec::new(0.0, 2).is_err());
        assert!(OutageSpec::new(1.0, 2).is_err());
        assert!(OutageSpec::new(0.1, 0).is_err());
    }

    #[test]
    fn zero_rate_never_outage() {
        assert_eq!(outage_probability(&at(10.0), 3, 0.0).unwrap(), 0.0);
        assert!(outage_probability(&at(10.0), 3, -0.1).is_err());
    }

    #[test]
    fn single_block_closed_form() {
        let spec = OutageSpec::new(0.01, 1).unwrap();
        let c = eps_outage_capacity(&at(10.0), &spec).unwrap();
        let exact = (1.0 + 10.0 * (1.0f64 / 0.99).ln()).log2();
        assert!((c.rate - exact).abs() < 1e-6);
        assert_eq!(c.method, CapacityMethod::Exact);
        let p = outage_probability(&at(10.0), 1, exact).unwrap();
        assert!((p - 0.01).abs() < 1e-6);
    }

    #[test]
    fn affine_offset_single_block() {
        let spec = OutageSpec::new(0.01, 1).unwrap();
        let a = affine_approx_capacity(&at(30.0), &spec).unwrap();
        let offset = (1.0f64 / 0.99).ln().log2();
        assert!((a.rate - (1000f64.log2() + offset)).abs() < 1e-5);
        // unit slope in log2(snr)
        let b = affine_approx_capacity(&at(40.0), &spec).unwrap();
        assert!(((b.rate - a.rate) / (10000f64.log2() - 1000f64.log2()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_median_is_mean_and_flags_negative() {
        let p = at(10.0);
        let g = gaussian_approx_capacity(&p, &OutageSpec::new(0.5, 4).unwrap()).unwrap();
        assert!((g.rate - mean_mutual_info(&p)).abs() < 1e-15);
        let low = gaussian_approx_capacity(&at(-10.0), &OutageSpec::new(0.001, 1).unwrap()).unwrap();
        assert!(low.negative && low.rate < 0.0);
    }

    #[test]
    fn chebyshev_geometry() {
        let p = at(10.0);
        let (lo, hi) = chebyshev_bounds(&p, &OutageSpec::new(0.01, 10).unwrap()).unwrap();
        let mu = mean_mutual_info(&p);
        assert!(((mu - lo) - (hi - mu)).abs() < 1e-12);
        let (lo4, hi4) = chebyshev_bounds(&p, &OutageSpec::new(0.01, 40).unwrap()).unwrap();
        assert!(((hi4 - lo4) * 2.0 - (hi - lo)).abs() < 1e-12);
        let (clo, _) = chebyshev_results(&at(-10.0), &OutageSpec::new(0.01, 1).unwrap()).unwrap();
        assert_eq!(clo.rate, 0.0);
    }
}
