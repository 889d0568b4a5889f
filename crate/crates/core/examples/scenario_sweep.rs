//! Loads the bundled reference scenario and re-runs its policy across a
//! range of land tax rates.

use assettax::scenario::{reference_scenario, GridSpec};

fn main() -> assettax::Result<()> {
    let scenario = reference_scenario();
    println!("schedules: {:?}", scenario.schedules.keys().collect::<Vec<_>>());

    let rates: GridSpec = "0:0.15:7".parse()?;
    println!("{:>6} {:>9} {:>14} {:>14}", "rate", "captured", "tax/month", "net/month");
    for t in rates.points() {
        let mut policy = scenario.policy.clone();
        policy.config.land_tax_rate = t;
        let out = policy.evaluate()?;
        let rho = policy.config.discount_rate;
        println!(
            "{t:>6.3} {:>9.4} {:>14.2} {:>14.2}",
            t / (t + rho),
            out.report.totals.property_tax_per_period,
            out.report.net_recurring_revenue_per_period
        );
    }
    Ok(())
}
