//! Thick-tail statistics: the local Pareto parameter and the average welfare
//! weight of everyone above a point.

use assettax::distributions::{DistributionModel, WeightFamily, WelfareWeightProfile};

fn main() -> assettax::Result<()> {
    let pareto = DistributionModel::pareto(1000.0, 2.0)?;
    let lognormal = DistributionModel::lognormal(10.5, 0.8)?;
    let pareto_g = WelfareWeightProfile::normalized(WeightFamily::Power { nu: 0.5 }, 1.0, &pareto)?;
    let lognormal_g = WelfareWeightProfile::normalized(WeightFamily::Power { nu: 0.5 }, 1.0, &lognormal)?;

    println!("{:>12} {:>10} {:>10} {:>10} {:>10}", "x", "a pareto", "G pareto", "a lognorm", "G lognorm");
    for p in [0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999] {
        let x = lognormal.quantile(p);
        let (ap, gp) = if x >= pareto.support_floor() {
            (pareto.local_pareto_parameter(x)?, pareto_g.avg_weight_above(&pareto, x)?)
        } else {
            (f64::NAN, 1.0)
        };
        println!(
            "{x:>12.1} {ap:>10.4} {gp:>10.4} {:>10.4} {:>10.4}",
            lognormal.local_pareto_parameter(x)?,
            lognormal_g.avg_weight_above(&lognormal, x)?,
        );
    }

    // Far enough out there is no mass left to average over.
    match pareto.local_pareto_parameter(1e12) {
        Err(e) => println!("\n{e}"),
        Ok(a) => println!("\nunexpected: {a}"),
    }
    Ok(())
}
