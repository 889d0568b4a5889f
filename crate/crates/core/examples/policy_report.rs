//! Treating a small portfolio of assets: each category gets its own
//! instrument, and the results roll up into a revenue report.

use assettax::distributions::{DistributionModel, ElasticityProfile, WeightFamily, WelfareWeightProfile};
use assettax::policy::{AssetCategory, AssetRecord, CreativeWork, PolicyScenario, PolicySchedules};
use assettax::schedules::{ScheduleKind, ScheduleParams};

fn schedule(kind: ScheduleKind, scale: f64, shape: f64) -> assettax::Result<ScheduleParams> {
    let m = DistributionModel::pareto(scale, shape)?;
    let g = WelfareWeightProfile::normalized(WeightFamily::Power { nu: 0.5 }, 1.0, &m)?;
    ScheduleParams::new(kind, m, g, ElasticityProfile::constant(0.5))
}

fn main() -> assettax::Result<()> {
    let assets = vec![
        AssetRecord { income_flow: 110.0, mortgage_value: 500.0, ..AssetRecord::new("lot", AssetCategory::LandOrUsefulPrivilege) },
        AssetRecord { income_flow: 155.0, market_value: 31_000.0, ..AssetRecord::new("medallion", AssetCategory::UselessPrivilege) },
        AssetRecord { market_value: 1e6, ..AssetRecord::new("mill", AssetCategory::Capital) },
        AssetRecord {
            market_value: 40_000.0,
            work: Some(CreativeWork { kind: "music".into(), quantity: 5_000.0 }),
            ..AssetRecord::new("symphony", AssetCategory::IntellectualProperty)
        },
        AssetRecord {
            market_value: 5e6,
            takeover_bid: Some(6e6),
            pv_net_investment: Some(4e6),
            publicly_traded: Some(false),
            creation_cost: Some(50_000.0),
            ..AssetRecord::new("pipeline", AssetCategory::UnregulatedNaturalMonopoly)
        },
    ];
    let scenario = PolicyScenario {
        assets,
        schedules: PolicySchedules {
            innovation: Some(schedule(ScheduleKind::InnovationPrize, 1000.0, 2.0)?),
            mineral: None,
            monopoly: Some(schedule(ScheduleKind::MonopolyPrize, 1e5, 1.2)?),
        },
        ..PolicyScenario::default()
    };

    let outcome = scenario.evaluate()?;
    for r in &outcome.results {
        println!(
            "{:<10} {:<28} tax/month {:>10.2}  prize {:>12.2}  abolished {}",
            r.asset_id,
            r.category.as_str(),
            r.recurring_tax_flow,
            r.prize_paid,
            r.abolished
        );
    }
    let report = &outcome.report;
    println!("\nnet recurring revenue per month: {:.2}", report.net_recurring_revenue_per_period);
    println!("net one-time revenue: {:.2}", report.net_lump_sum_revenue);
    println!("\n{}", serde_json::to_string_pretty(&report.totals).expect("serializable"));
    Ok(())
}
