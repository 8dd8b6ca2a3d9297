//! Moments and the exact law of accumulated mutual information, checked
//! against Monte Carlo draws.

use harq_outage::channel::{
    mean_mutual_info, sample_mi_sum, std_mutual_info, ChannelParams, MutualInfoDist, SumMode,
};

fn main() -> harq_outage::error::Result<()> {
    for db in [0.0, 10.0, 20.0, 60.0] {
        let p = ChannelParams::from_db(db)?;
        println!("{db:>4} dB: mu = {:.6}  sigma = {:.6}", mean_mutual_info(&p), std_mutual_info(&p)?);
    }
    let p = ChannelParams::from_db(10.0)?;
    for k in [1, 2, 5] {
        let exact = MutualInfoDist::exact(&p, k, SumMode::Sum)?;
        let mc = sample_mi_sum(&p, k, 200_000, 42)?;
        for q in [0.01, 0.5] {
            println!(
                "k = {k}: quantile({q}) exact {:.4}  monte carlo {:.4}",
                exact.quantile(q)?,
                mc.quantile(q)?
            );
        }
    }
    Ok(())
}
