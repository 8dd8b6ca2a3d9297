//! Long-term rate of incremental-redundancy H-ARQ with the outage at
//! termination pinned to ε.

use harq_outage::channel::ChannelParams;
use harq_outage::harq::{expected_rounds_approx, gap_ec_ir, ir_rate, ir_rate_gaussian};

fn main() -> harq_outage::error::Result<()> {
    let eps = 0.01;
    for db in [0.0, 10.0, 20.0, 30.0] {
        let p = ChannelParams::from_db(db)?;
        for m in [2, 6] {
            let a = ir_rate(&p, m, eps)?;
            println!(
                "{db:>4} dB M = {m}: R_init {:.4}  E[X] {:.4}  rate {:.4}  gaussian {:.4}",
                a.initial_rate,
                a.expected_rounds,
                a.longterm_rate,
                ir_rate_gaussian(&p, m, eps)?
            );
        }
    }
    let p = ChannelParams::from_db(10.0)?;
    for m in [10, 20, 50, 100] {
        let gap = gap_ec_ir(&p, m, eps)?;
        println!(
            "M = {m:>3}: E[X] {:.3} (approx {:.3})  gap {:.4}  ~ {:.4}",
            ir_rate(&p, m, eps)?.expected_rounds,
            expected_rounds_approx(&p, m, eps)?,
            gap.exact,
            gap.approx_leading
        );
    }
    Ok(())
}
