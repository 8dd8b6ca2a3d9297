//! Maximising the long-term rate over the initial rate. At moderate SNR
//! the ε-matched rate is already optimal; at high SNR backing off helps.

use harq_outage::channel::ChannelParams;
use harq_outage::harq::{optimize_cc_rate, optimize_initial_rate};

fn main() -> harq_outage::error::Result<()> {
    let eps = 0.01;
    for db in [10.0, 20.0, 30.0, 40.0, 55.0] {
        let p = ChannelParams::from_db(db)?;
        let ir = optimize_initial_rate(&p, 2, eps)?;
        let cc = optimize_cc_rate(&p, 2, eps)?;
        println!(
            "{db:>4} dB IR: r {:.3} -> {:.3}, rate {:.4} -> {:.4}{}   CC rate {:.4} -> {:.4}",
            ir.unoptimized_r,
            ir.r_opt,
            ir.unoptimized_rate,
            ir.rate_opt,
            if ir.at_endpoint { " (endpoint)" } else { "" },
            cc.unoptimized_rate,
            cc.rate_opt
        );
    }
    Ok(())
}
