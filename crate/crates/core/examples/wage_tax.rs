//! Optimal marginal and total wage tax over a log-normal earnings
//! distribution, next to the complementary innovation prize.

use assettax::distributions::{DistributionModel, ElasticityProfile, WeightFamily, WelfareWeightProfile};
use assettax::schedules::{integrate_schedule, marginal_innovation_prize, ScheduleKind, ScheduleParams};

fn main() -> assettax::Result<()> {
    let earnings = DistributionModel::lognormal(10.5, 0.8)?;
    let weights = WelfareWeightProfile::normalized(WeightFamily::Power { nu: 0.5 }, 1.0, &earnings)?;
    let params = ScheduleParams::new(ScheduleKind::WageTax, earnings, weights, ElasticityProfile::constant(0.5))?;

    let grid: Vec<f64> = (0..=12).map(|i| 25_000.0 * i as f64).collect();
    let schedule = integrate_schedule(&params, &grid)?;
    println!("{:>9} {:>9} {:>12} {:>9} {:>9}", "earnings", "T'", "T", "avg rate", "P'");
    for row in schedule.rows() {
        let avg = if row.x > 0.0 { row.total / row.x } else { 0.0 };
        let prize = marginal_innovation_prize(&params, row.x)?.value;
        println!("{:>9.0} {:>9.4} {:>12.2} {:>9.4} {:>9.4}", row.x, row.marginal, row.total, avg, prize);
    }
    Ok(())
}
