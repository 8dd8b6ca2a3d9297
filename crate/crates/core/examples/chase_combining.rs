//! Chase combining: closed-form rate through the Erlang law and its
//! high-SNR affine form.

use harq_outage::channel::ChannelParams;
use harq_outage::harq::{cc_affine, cc_rate, ir_rate};

fn main() -> harq_outage::error::Result<()> {
    let eps = 0.01;
    for m in [2, 4] {
        let (prelog, offset) = cc_affine(&ChannelParams::from_db(0.0)?, m, eps)?;
        println!("M = {m}: high-SNR rate ~ {prelog:.4} log2(snr) + {offset:.4}");
        for db in [0.0, 10.0, 30.0, 50.0] {
            let p = ChannelParams::from_db(db)?;
            let cc = cc_rate(&p, m, eps)?;
            println!(
                "  {db:>4} dB: E[X] {:.4}  CC {:.4}  IR {:.4}",
                cc.expected_rounds,
                cc.longterm_rate,
                ir_rate(&p, m, eps)?.longterm_rate
            );
        }
    }
    Ok(())
}
