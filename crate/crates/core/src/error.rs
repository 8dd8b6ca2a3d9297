use thiserror::Error;

/// Errors raised by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} outside domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("integrand is not finite at node x = {node}")]
    NonFiniteIntegrand { node: f64 },

    #[error("quantile p = {p} not bracketed by grid CDF range [{lo}, {hi}]")]
    Bracket { p: f64, lo: f64, hi: f64 },

    #[error("negative variance {0} from numerical cancellation")]
    NegativeVariance(f64),

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(function: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            value: p,
            expected: "0 < p < 1",
        })
    }
}
