//! Probability that the received power stays below the harvester's
//! sensitivity, over distance, for two transmit powers.

use rfharvest::channel::{dbm_to_mw, FadingChannel, LinkBudget};
use rfharvest::harvester::Dataset;
use rfharvest::stats::sensitivity_outage;

fn main() -> rfharvest::Result<()> {
    let ch = FadingChannel::default();
    println!("dataset,P_T_dBm,d_m,outage");
    for ds in Dataset::ALL {
        let sen = dbm_to_mw(ds.sensitivity_dbm());
        for p_dbm in [20.0, 35.0] {
            for d in [2.0, 4.0, 6.0, 8.0, 10.0] {
                let link = LinkBudget::new(dbm_to_mw(p_dbm), d)?;
                println!("{ds},{p_dbm},{d},{:.6}", sensitivity_outage(&link, &ch, sen)?);
            }
        }
    }
    Ok(())
}
