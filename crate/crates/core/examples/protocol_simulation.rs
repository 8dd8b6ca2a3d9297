//! Message-level simulation of the protocol next to the analytic values.

use harq_outage::channel::ChannelParams;
use harq_outage::harq::{HarqConfig, Protocol};
use harq_outage::sim::{simulate, SimConfig};

fn main() -> harq_outage::error::Result<()> {
    let params = ChannelParams::from_db(10.0)?;
    for protocol in [Protocol::IncrementalRedundancy, Protocol::ChaseCombining] {
        for m in [2, 4] {
            let harq = HarqConfig::new(protocol, m, 0.01)?;
            let analytic = harq.analyze(&params)?;
            let report = simulate(&SimConfig::new(params, harq, 1_000_000, 2024)?)?;
            println!(
                "{} M = {m}: rate {:.4} ± {:.4} (analytic {:.4})  outage {:.4} ± {:.4}  rounds {:?}",
                protocol.tag(),
                report.empirical_rate,
                report.ci95_rate,
                analytic.longterm_rate,
                report.empirical_outage,
                report.ci95_outage,
                report.rounds_histogram
            );
        }
    }
    Ok(())
}
