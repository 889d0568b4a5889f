//! Steady-state effort and wealth for an agent facing a prize schedule,
//! checked against an exhaustive grid search.

use assettax::agents::{brute_force_best_response, solve_steady_state, AgentProfile, Disutility, WealthUtility};
use assettax::distributions::{DistributionModel, ElasticityProfile, WeightFamily, WelfareWeightProfile};
use assettax::schedules::{integrate_schedule, ScheduleKind, ScheduleParams};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn main() -> assettax::Result<()> {
    let values = DistributionModel::pareto(1.0, 2.0)?;
    let weights = WelfareWeightProfile::normalized(WeightFamily::Power { nu: 0.5 }, 1.0, &values)?;
    let params = ScheduleParams::new(ScheduleKind::InnovationPrize, values, weights, ElasticityProfile::constant(0.5))?
        .with_floor(3.0, 1.0)?;
    let schedule = integrate_schedule(&params, &linspace(0.0, 50.0, 101))?;

    let agent = AgentProfile {
        name: "inventor".into(),
        delta: 0.06,
        wealth_utility: WealthUtility::Log { beta: 1.0 },
        disutility: Disutility { elasticity: 1.0, scale: 8.0 },
        k_init: 40.0,
        n: 10.0,
        r: 0.04,
    };
    let ss = solve_steady_state(&agent, &schedule)?;
    println!("effort {:.6}, prize {:.6}, wealth {:.6}, consumption {:.6}", ss.s, ss.prize, ss.k, ss.c);
    println!("flow utility {:.6}, present value {:.6}, FOC residual {:.2e}", ss.flow_utility, ss.pv_utility, ss.foc_residual);

    let grid = brute_force_best_response(&agent, &schedule, &linspace(0.0, 20.0, 401), &linspace(5.0, 150.0, 401))?;
    println!("grid search: effort {:.4}, wealth {:.4}", grid.s, grid.k);
    Ok(())
}
