//! Gaussian tail, exponential integral and Erlang quantile.

use harq_outage::special::{erlang_cdf, erlang_quantile, exp_integral_e1, q_function, q_inverse, q_tail_integral};

fn main() -> harq_outage::error::Result<()> {
    for p in [0.2, 0.05, 0.01, 1e-3, 1e-6] {
        let x = q_inverse(p)?;
        println!("Q^-1({p:e}) = {x:.6}   Q(x) = {:.3e}   tail integral = {:.6}", q_function(x)?, q_tail_integral(x));
    }
    for x in [1e-3, 0.1, 1.0, 10.0] {
        println!("E1({x}) = {:.10}", exp_integral_e1(x)?);
    }
    for m in 1..=4 {
        let t = erlang_quantile(0.01, m)?;
        println!("Erlang({m}) 1% quantile = {t:.6}   cdf check = {:.6}", erlang_cdf(t, m));
    }
    Ok(())
}
