//! Self-check: worked numbers, policy treatments on the loaded scenario, and
//! independent oracle comparisons.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::agents::{brute_force_best_response, present_value_utility, solve_steady_state, SteadyState};
use crate::distributions::{DistributionKind, WeightFamily};
use crate::error::Result;
use crate::policy::{assessor_award, creation_cost, monopoly_excess_value, AssetCategory, CreativeWork, PolicyConfig};
use crate::quadrature::integrate;
use crate::scenario::Scenario;
use crate::schedules::{formula, integrate_schedule, FormulaInputs, ScheduleKind};
use crate::valuation::{annualize, asset_value_flows, captured_share, required_rate};

pub const DEFAULT_SEED: u64 = 20_251_015;
const MONTE_CARLO_DRAWS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checklist {
    pub checks: Vec<Check>,
}

impl Checklist {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "[{mark}] {}: {}", c.name, c.detail);
        }
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), self.failures());
        out
    }
}

struct Builder(Vec<Check>);

impl Builder {
    fn add(&mut self, name: impl Into<String>, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.0.push(Check { name: name.into(), detail, passed });
    }

    fn close(&mut self, name: impl Into<String>, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.add(name, Ok((ok, format!("{got} (expected {want}, tol {tol:e})"))));
    }
}

/// Runs every check against `scenario`. `seed` drives the Monte Carlo
/// comparisons only.
pub fn verify(scenario: &Scenario, seed: u64) -> Checklist {
    let mut b = Builder(Vec::new());
    worked_numbers(&mut b);
    scenario_valuations(&mut b, scenario);
    prize_floors(&mut b, scenario);
    policy_treatments(&mut b, scenario);
    pareto_constancy(&mut b, scenario);
    complementarity(&mut b, scenario);
    monte_carlo_weights(&mut b, scenario, seed);
    agent_oracles(&mut b, scenario);
    Checklist { checks: b.0 }
}

fn worked_numbers(b: &mut Builder) {
    b.add("captured share at 15%/month, 0.5%/month discount = 30/31", {
        captured_share(0.15, 0.005).map(|v| ((v - 30.0 / 31.0).abs() <= 1e-12, format!("{v} vs {}", 30.0 / 31.0)))
    });
    b.add("captured share at 5%/month = 10/11", {
        captured_share(0.05, 0.005).map(|v| ((v - 10.0 / 11.0).abs() <= 1e-12, format!("{v} vs {}", 10.0 / 11.0)))
    });
    b.add("rate capturing 30/31 = 15%/month", {
        required_rate(30.0 / 31.0, 0.005).map(|v| ((v - 0.15).abs() <= 1e-12, format!("{v}")))
    });
    let year = annualize(0.15, 12);
    b.add("15%/month = 180%/year", Ok((year == 1.8, format!("{}%", year * 100.0))));
    let century = annualize(0.02, 100);
    b.add("2%/year = 200%/century", Ok((century == 2.0, format!("{}%", century * 100.0))));

    // One unit of consumption forever, discounted and scaled by delta.
    let delta = 0.05;
    let horizon = 60.0 / delta;
    b.add("constant unit consumption path is worth 1", {
        integrate(|t| delta * (-delta * t).exp(), 0.0, horizon, 1e-12).map(|v| {
            let v = v + (-delta * horizon).exp();
            ((v - 1.0).abs() <= 1e-8, format!("{v}"))
        })
    });
    let agent = crate::agents::AgentProfile {
        name: "unit".into(),
        delta,
        wealth_utility: crate::agents::WealthUtility::Log { beta: 1.0 },
        disutility: crate::agents::Disutility::quadratic(),
        k_init: 1.0,
        n: 1.0,
        r: 0.01,
    };
    // ln 1 = 0 and no effort: flow utility is consumption alone.
    let ss = SteadyState { c: 1.0, k: 1.0, s: 0.0, prize: 0.0, flow_utility: agent.flow_utility(1.0, 1.0, 0.0), pv_utility: 0.0, foc_residual: 0.0, boundary: false };
    let pv = present_value_utility(&agent, &ss);
    b.add("present value of unit consumption with k = k_init is 1", Ok(((pv - 1.0).abs() <= 1e-12, format!("{pv}"))));

    let conventions = crate::policy::CostConventions::default();
    let work = |kind: &str, quantity| CreativeWork { kind: kind.into(), quantity };
    b.add("1000 words of poetry cost 5000", {
        creation_cost(&work("poetry", 1000.0), &conventions).map(|v| (v == 5000.0, format!("{v}")))
    });
    b.add("10 days of prospecting cost 5000", {
        creation_cost(&work("prospecting", 10.0), &conventions).map(|v| (v == 5000.0, format!("{v}")))
    });
    let award = assessor_award(1000.0, &PolicyConfig::default());
    b.add("assessor award on 1000 of taxes at 1% = 10", Ok((award == 10.0, format!("{award}"))));
}

fn scenario_valuations(b: &mut Builder, scenario: &Scenario) {
    for (name, v) in &scenario.file.valuations {
        b.add(format!("valuation `{name}` is a fixed point of the flow form"), (|| {
            let value = v.value()?;
            let flows = asset_value_flows(v.income_flow, v.tax_rate * value, v.discount_rate)?;
            let rel = (value - flows).abs() / value.abs().max(f64::MIN_POSITIVE);
            Ok((rel <= 1e-10, format!("{value} vs {flows}; captured share {}", v.captured_share()?)))
        })());
    }
}

fn prize_floors(b: &mut Builder, scenario: &Scenario) {
    for (name, s) in &scenario.schedules {
        let Some(x0) = s.params.junction() else { continue };
        b.add(format!("schedule `{name}` reimburses value up to {x0}"), (|| {
            let mut worst: f64 = 0.0;
            for i in 0..=20 {
                let x = x0 * i as f64 / 20.0;
                worst = worst.max((s.params.total_at(x)? - x).abs());
            }
            Ok((worst == 0.0, format!("max |P(x) - x| = {worst:e}")))
        })());
        b.add(format!("schedule `{name}` is continuous at the junction"), (|| {
            let mut worst: f64 = 0.0;
            for k in 4..=10 {
                let h = x0.max(1.0) * 10f64.powi(-k);
                // 0 <= P' <= 1 in regime, so the step can move P by at most h.
                let jump = (s.params.total_at(x0 + h)? - x0).abs() - h;
                worst = worst.max(jump);
            }
            Ok((worst <= 1e-8, format!("largest excess over h: {worst:e}")))
        })());
    }
}

fn policy_treatments(b: &mut Builder, scenario: &Scenario) {
    let outcome = match scenario.policy.evaluate() {
        Ok(o) => o,
        Err(e) => {
            b.add("policy run", Err(e));
            return;
        }
    };
    let config = &scenario.policy.config;
    let share = config.land_tax_rate / (config.land_tax_rate + config.discount_rate);
    for (asset, r) in scenario.policy.assets.iter().map(|a| (a, outcome.results.iter().find(|r| r.asset_id == a.id).unwrap())) {
        let id = &asset.id;
        match asset.category {
            AssetCategory::LandOrUsefulPrivilege => {
                let got = r.recurring_tax_flow / asset.income_flow;
                b.close(format!("land `{id}` pays t/(t+rho) of its rent"), got, share, 1e-12);
            }
            AssetCategory::UselessPrivilege => {
                let zero = r.revenue.property_tax == 0.0
                    && r.revenue.auction == 0.0
                    && r.revenue.severance == 0.0
                    && r.revenue.one_time_levy == 0.0
                    && r.prize_paid == 0.0;
                b.add(format!("privilege `{id}` abolished"), Ok((r.abolished && zero, format!("abolished = {}", r.abolished))));
            }
            AssetCategory::Capital => {
                let levy = config.one_time_capital_levy.as_ref().map_or(0.0, |l| l.rate * asset.market_value);
                let ok = r.recurring_tax_flow == 0.0 && r.revenue.one_time_levy == levy;
                b.add(format!("capital `{id}` untaxed"), Ok((ok, format!("recurring {}, one-time {}", r.recurring_tax_flow, r.revenue.one_time_levy))));
            }
            AssetCategory::UnregulatedNaturalMonopoly => {
                let base = monopoly_excess_value(
                    asset.market_value,
                    asset.takeover_bid.unwrap_or_default(),
                    asset.pv_net_investment.unwrap_or_default(),
                );
                let want = (asset.market_value.max(asset.takeover_bid.unwrap_or_default()) - asset.pv_net_investment.unwrap_or_default()).max(0.0);
                let tax_ok = (r.recurring_tax_flow - config.land_tax_rate * want).abs() <= 1e-9 * want.max(1.0);
                b.add(
                    format!("monopoly `{id}` taxed on excess value"),
                    Ok((base == want && tax_ok && r.prize_paid <= want, format!("base {base}, tax {}", r.recurring_tax_flow))),
                );
            }
            AssetCategory::IntellectualProperty | AssetCategory::MineralDeposit => {
                let ok = r.prize_paid >= 0.0 && r.prize_paid <= asset.market_value && r.recurring_tax_flow == 0.0;
                let open = asset.category != AssetCategory::IntellectualProperty || r.free_access;
                b.add(format!("`{id}` receives a prize within its value"), Ok((ok && open, format!("prize {}", r.prize_paid))));
            }
        }
    }
}

fn pareto_constancy(b: &mut Builder, scenario: &Scenario) {
    for (name, d) in &scenario.distributions {
        let DistributionKind::Pareto { shape, .. } = *d.kind() else { continue };
        b.add(format!("`{name}` has constant local Pareto parameter {shape}"), (|| {
            let (lo, hi) = (d.support_floor(), d.upper_quantile(1e-9));
            let mut worst: f64 = 0.0;
            for i in 0..100 {
                let x = lo * (hi / lo).powf(i as f64 / 99.0);
                worst = worst.max((d.local_pareto_parameter(x)? - shape).abs());
            }
            Ok((worst <= 1e-9, format!("max deviation {worst:e}")))
        })());
    }
}

fn complementarity(b: &mut Builder, scenario: &Scenario) {
    for (name, s) in &scenario.schedules {
        b.add(format!("wage tax and innovation prize are complements on `{name}`"), (|| {
            let mut worst: f64 = 0.0;
            for x in scenario.grid_for(name, None).unwrap_or_default() {
                let (inputs, _) = s.params.inputs_at(x)?;
                let inputs = FormulaInputs { benefit_weight: 1.0, ..inputs };
                if 1.0 - inputs.avg_weight + inputs.alpha * inputs.elasticity <= 0.0 {
                    continue;
                }
                let sum = formula(ScheduleKind::WageTax, &inputs)? + formula(ScheduleKind::InnovationPrize, &inputs)?;
                worst = worst.max((sum - 1.0).abs());
            }
            Ok((worst <= 1e-12, format!("max |T' + P' - 1| = {worst:e}")))
        })());
    }
}

fn monte_carlo_weights(b: &mut Builder, scenario: &Scenario, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, s) in &scenario.schedules {
        if matches!(s.params.weights.family(), WeightFamily::Constant) {
            continue;
        }
        let d = &s.params.distribution;
        let probe = d.quantile(0.5);
        let draws: Vec<f64> = (0..MONTE_CARLO_DRAWS).map(|_| d.quantile(rng.random_range(1e-12..1.0 - 1e-12))).collect();
        let above: Vec<f64> = draws.iter().filter(|&&x| x > probe).map(|&x| s.params.weights.weight(x)).collect();
        let n = above.len() as f64;
        let mean = above.iter().sum::<f64>() / n;
        let var = above.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        b.add(format!("average weight above the median of `{name}` matches simulation (seed {seed})"), {
            s.params.weights.avg_weight_above(d, probe).map(|g| {
                ((g - mean).abs() <= 5.0 * se + 1e-9, format!("quadrature {g:.6}, simulated {mean:.6} +/- {se:.1e}"))
            })
        });
    }
}

fn agent_oracles(b: &mut Builder, scenario: &Scenario) {
    for (sched_name, agents) in &scenario.file.agents {
        let Some(sched) = scenario.schedule(sched_name) else { continue };
        let grid = scenario.grid_for(sched_name, None).unwrap_or_default();
        let schedule = match integrate_schedule(&sched.params, &grid) {
            Ok(s) => s,
            Err(e) => {
                b.add(format!("schedule `{sched_name}` integrates"), Err(e));
                continue;
            }
        };
        for agent in agents {
            b.add(format!("agent `{}` matches grid search", agent.name), (|| {
                let ss = solve_steady_state(agent, &schedule)?;
                let (_, hi) = schedule.domain();
                let s_hi = (3.0 * ss.s).clamp(1.0, hi);
                let s_grid = linspace(0.0, s_hi, 201);
                let k_grid = linspace(ss.k / 4.0, ss.k * 3.0, 201);
                let br = brute_force_best_response(agent, &schedule, &s_grid, &k_grid)?;
                let (ds, dk) = (s_grid[1] - s_grid[0], k_grid[1] - k_grid[0]);
                let budget = ss.c - (agent.n + agent.r * ss.k + ss.prize);
                let ok = (br.s - ss.s).abs() <= ds && (br.k - ss.k).abs() <= dk && budget == 0.0;
                Ok((ok, format!("effort {} vs {} (step {ds:.3e}), wealth {} vs {}", ss.s, br.s, ss.k, br.k)))
            })());
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::reference_scenario;

    #[test]
    fn reference_scenario_passes() {
        let list = verify(&reference_scenario(), DEFAULT_SEED);
        assert!(list.all_passed(), "{}", list.to_text());
        let text = list.to_text();
        for needle in ["30/31", "10/11", "180%"] {
            assert!(text.contains(needle), "{needle}");
        }
    }

    #[test]
    fn same_seed_same_text() {
        let s = reference_scenario();
        assert_eq!(verify(&s, 7).to_text(), verify(&s, 7).to_text());
    }
}
