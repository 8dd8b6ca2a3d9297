//! ε-outage capacity without retransmissions, with its approximations and
//! the gap to ergodic capacity.

use harq_outage::channel::{mean_mutual_info, ChannelParams};
use harq_outage::outage::{
    affine_approx_capacity, chebyshev_bounds, eps_outage_capacity, gap_ec_fd, gaussian_approx_capacity,
    OutageSpec,
};

fn main() -> harq_outage::error::Result<()> {
    let eps = 0.01;
    println!("snr_db  L  ergodic  exact  gaussian  affine  chebyshev");
    for db in [0.0, 10.0, 20.0, 30.0] {
        let p = ChannelParams::from_db(db)?;
        for l in [1, 3, 10] {
            let spec = OutageSpec::new(eps, l)?;
            let gauss = gaussian_approx_capacity(&p, &spec)?;
            let (lo, hi) = chebyshev_bounds(&p, &spec)?;
            println!(
                "{db:>5} {l:>3} {:>8.4} {:>6.4} {:>8.4}{} {:>7.4} [{lo:.2}, {hi:.2}]",
                mean_mutual_info(&p),
                eps_outage_capacity(&p, &spec)?.rate,
                gauss.rate,
                if gauss.negative { "*" } else { " " },
                affine_approx_capacity(&p, &spec)?.rate,
            );
        }
    }
    let p = ChannelParams::from_db(20.0)?;
    for l in [8, 16, 32, 64] {
        let gap = gap_ec_fd(&p, &OutageSpec::new(eps, l)?)?;
        println!("gap at L = {l}: exact {:.4}  approx {:.4}", gap.exact, gap.approx);
    }
    Ok(())
}
