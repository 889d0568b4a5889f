//! An innovation prize schedule: full reimbursement up to three times cost,
//! then the integrated optimal marginal prize.

use assettax::distributions::{DistributionModel, ElasticityProfile, WeightFamily, WelfareWeightProfile};
use assettax::schedules::{integrate_schedule, ScheduleKind, ScheduleParams};

fn main() -> assettax::Result<()> {
    let values = DistributionModel::pareto(1000.0, 2.0)?;
    let weights = WelfareWeightProfile::normalized(WeightFamily::Power { nu: 0.5 }, 1.0, &values)?;
    let params = ScheduleParams::new(ScheduleKind::InnovationPrize, values, weights, ElasticityProfile::constant(0.5))?
        .with_floor(3.0, 1000.0)?;

    let grid: Vec<f64> = (0..=10).map(|i| 1000.0 * i as f64).collect();
    let schedule = integrate_schedule(&params, &grid)?;
    println!("{:>8} {:>10} {:>12} {:>8}", "value", "marginal", "prize", "regime");
    for row in schedule.rows() {
        println!("{:>8.0} {:>10.6} {:>12.3} {:>8}", row.x, row.marginal, row.total, row.regime.as_str());
    }
    println!("junction at {:?}", schedule.junction());
    println!("prize for a 7,500 innovation: {:.3}", schedule.total_at(7500.0)?);
    println!("prize for a 250,000 innovation: {:.3}", params.total_at(250_000.0)?);
    Ok(())
}
