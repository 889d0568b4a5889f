//! Steady-state responses of prize earners to an integrated prize schedule.
//!
//! An agent has quasilinear flow utility `c + a(k) - h2(s)` and budget
//! `dk/dt = n + r k + P(s) - c`. With the budget multiplier equal to one,
//! the optimal plan jumps at once to the steady state
//!
//! ```text
//! h2'(s) = P'(s),   a'(k) = delta - r,   c = n + r k + P(s).
//! ```
//!
//! The two conditions separate: wealth never depends on the prize schedule.
//! A prize earner has no wage channel, so the profile carries no labor
//! income field at all.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{find_root, RESIDUAL_TOL};
use crate::schedules::IntegratedSchedule;

/// Increasing, strictly concave utility of holding wealth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WealthUtility {
    /// `beta ln k`
    Log { beta: f64 },
    /// `beta k^(1 - sigma) / (1 - sigma)`, `sigma > 0`, `sigma != 1`
    Crra { beta: f64, sigma: f64 },
}

impl WealthUtility {
    fn validate(&self) -> Result<()> {
        match *self {
            WealthUtility::Log { beta } if beta > 0.0 && beta.is_finite() => Ok(()),
            WealthUtility::Crra { beta, sigma } if beta > 0.0 && sigma > 0.0 && sigma != 1.0 && sigma.is_finite() => Ok(()),
            _ => Err(Error::domain("wealth utility needs beta > 0 (and sigma > 0, sigma != 1 for crra)")),
        }
    }

    pub fn value(&self, k: f64) -> f64 {
        match *self {
            WealthUtility::Log { beta } => beta * k.ln(),
            WealthUtility::Crra { beta, sigma } => beta * k.powf(1.0 - sigma) / (1.0 - sigma),
        }
    }

    pub fn derivative(&self, k: f64) -> f64 {
        match *self {
            WealthUtility::Log { beta } => beta / k,
            WealthUtility::Crra { beta, sigma } => beta * k.powf(-sigma),
        }
    }

    /// Wealth at which the marginal utility equals `m > 0`.
    pub fn wealth_for_marginal(&self, m: f64) -> f64 {
        match *self {
            WealthUtility::Log { beta } => beta / m,
            WealthUtility::Crra { beta, sigma } => (beta / m).powf(1.0 / sigma),
        }
    }
}

/// Isoelastic effort cost `s^(1 + 1/e) / (scale (1 + 1/e))`, so that
/// `h2'(s) = s^(1/e) / scale` and supply has elasticity `e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disutility {
    pub elasticity: f64,
    pub scale: f64,
}

impl Disutility {
    pub fn quadratic() -> Self {
        Self { elasticity: 1.0, scale: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        if self.elasticity > 0.0 && self.scale > 0.0 && self.elasticity.is_finite() && self.scale.is_finite() {
            Ok(())
        } else {
            Err(Error::domain("disutility needs elasticity > 0 and scale > 0"))
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        let power = 1.0 + 1.0 / self.elasticity;
        s.max(0.0).powf(power) / (self.scale * power)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        s.max(0.0).powf(1.0 / self.elasticity) / self.scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentProfile {
    pub name: String,
    /// Utility discount rate.
    pub delta: f64,
    pub wealth_utility: WealthUtility,
    pub disutility: Disutility,
    pub k_init: f64,
    /// After-tax income from land and other privileges.
    pub n: f64,
    /// Return on capital.
    pub r: f64,
}

impl AgentProfile {
    pub fn validate(&self) -> Result<()> {
        self.wealth_utility.validate()?;
        self.disutility.validate()?;
        if !(self.r > 0.0 && self.r.is_finite()) || !self.delta.is_finite() {
            return Err(Error::domain("agent needs r > 0 and a finite delta"));
        }
        if !(self.n >= 0.0 && self.n.is_finite()) {
            return Err(Error::domain("privilege income n must be >= 0"));
        }
        if !(self.k_init >= 0.0 && self.k_init.is_finite()) {
            return Err(Error::domain("initial wealth must be >= 0"));
        }
        Ok(())
    }

    /// Wealth solving `a'(k) = delta - r`.
    pub fn steady_wealth(&self) -> Result<f64> {
        if !(self.delta > self.r) {
            return Err(Error::NoInteriorWealth { delta: self.delta, r: self.r });
        }
        Ok(self.wealth_utility.wealth_for_marginal(self.delta - self.r))
    }

    pub fn flow_utility(&self, c: f64, k: f64, s: f64) -> f64 {
        c + self.wealth_utility.value(k) - self.disutility.value(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub c: f64,
    pub k: f64,
    pub s: f64,
    pub prize: f64,
    pub flow_utility: f64,
    pub pv_utility: f64,
    /// `P'(s) - h2'(s)` at the solution; nonzero at kinks and edges.
    pub foc_residual: f64,
    /// Effort sits at an edge of the schedule's domain without a crossing.
    pub boundary: bool,
}

/// Present-value utility of a steady state: flow utility plus
/// `delta (k - k_init)`.
pub fn present_value_utility(agent: &AgentProfile, ss: &SteadyState) -> f64 {
    ss.flow_utility + agent.delta * (ss.k - agent.k_init)
}

/// Solves the steady state of `agent` facing `schedule`.
///
/// Effort is the best crossing of `h2'(s) = P'(s)` on the schedule's domain,
/// found by scanning for sign changes and refining each bracket. When no
/// crossing exists the best domain edge is returned and flagged.
pub fn solve_steady_state(agent: &AgentProfile, schedule: &IntegratedSchedule) -> Result<SteadyState> {
    agent.validate()?;
    let k = agent.steady_wealth()?;

    let gap = |s: f64| schedule.marginal_at(s).map(|p| p - agent.disutility.derivative(s));
    let payoff = |s: f64| schedule.total_at(s).map(|p| p - agent.disutility.value(s));

    let (lo, hi) = schedule.domain();
    let mut scan = Vec::new();
    for w in schedule.grid().windows(2) {
        for j in 0..4 {
            scan.push(w[0] + (w[1] - w[0]) * j as f64 / 4.0);
        }
    }
    scan.push(hi);

    let mut candidates = Vec::new();
    let mut prev = (scan[0], gap(scan[0])?);
    if prev.1 < 0.0 {
        candidates.push(lo);
    }
    for &s in &scan[1..] {
        let g = gap(s)?;
        if prev.1 >= 0.0 && g < 0.0 {
            let root = find_root(|x| gap(x).unwrap_or(f64::NAN), prev.0, s, RESIDUAL_TOL)?;
            candidates.push(root);
        }
        prev = (s, g);
    }
    if prev.1 > 0.0 || candidates.is_empty() {
        candidates.push(hi);
    }

    let mut best: Option<(f64, f64)> = None;
    for &s in &candidates {
        let v = payoff(s)?;
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((s, v));
        }
    }
    let (s, _) = best.expect("at least one candidate");
    let residual = gap(s)?;
    let boundary = (s == lo || s == hi) && residual.abs() > RESIDUAL_TOL;

    let prize = schedule.total_at(s)?;
    let c = agent.n + agent.r * k + prize;
    let flow_utility = agent.flow_utility(c, k, s);
    let mut ss = SteadyState { c, k, s, prize, flow_utility, pv_utility: 0.0, foc_residual: residual, boundary };
    ss.pv_utility = present_value_utility(agent, &ss);
    Ok(ss)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestResponse {
    pub s: f64,
    pub k: f64,
    pub flow_utility: f64,
}

fn check_axis(grid: &[f64], name: &str) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::domain(format!("{name} grid needs at least 3 points")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!("{name} grid must be finite and strictly increasing")));
    }
    Ok(())
}

/// Exhaustive search over `s_grid x k_grid`.
///
/// Consumption follows the budget, `c = n + r k + P(s)`. Holding wealth `k`
/// forgoes `delta k` of lifetime utility, so the objective is flow utility
/// minus `delta k`; this is the objective whose first-order conditions are
/// the ones [`solve_steady_state`] solves. Returns the argmax and its flow
/// utility. An argmax on a grid edge is an error, except at effort zero.
pub fn brute_force_best_response(
    agent: &AgentProfile,
    schedule: &IntegratedSchedule,
    s_grid: &[f64],
    k_grid: &[f64],
) -> Result<BestResponse> {
    agent.validate()?;
    check_axis(s_grid, "effort")?;
    check_axis(k_grid, "wealth")?;
    if k_grid[0] <= 0.0 {
        return Err(Error::domain("wealth grid must be positive"));
    }
    let effort_payoff: Vec<f64> = s_grid
        .iter()
        .map(|&s| schedule.total_at(s).map(|p| p - agent.disutility.value(s)))
        .collect::<Result<_>>()?;
    let wealth_payoff: Vec<f64> = k_grid
        .iter()
        .map(|&k| agent.r * k + agent.wealth_utility.value(k) - agent.delta * k)
        .collect();

    let mut best = (0, 0, f64::NEG_INFINITY);
    for (i, ep) in effort_payoff.iter().enumerate() {
        for (j, wp) in wealth_payoff.iter().enumerate() {
            let objective = agent.n + ep + wp;
            if objective > best.2 {
                best = (i, j, objective);
            }
        }
    }
    let (i, j, _) = best;
    if i + 1 == s_grid.len() || (i == 0 && s_grid[0] > 0.0) {
        return Err(Error::GridBoundary { axis: "effort", value: s_grid[i] });
    }
    if j == 0 || j + 1 == k_grid.len() {
        return Err(Error::GridBoundary { axis: "wealth", value: k_grid[j] });
    }
    let (s, k) = (s_grid[i], k_grid[j]);
    let c = agent.n + agent.r * k + schedule.total_at(s)?;
    Ok(BestResponse { s, k, flow_utility: agent.flow_utility(c, k, s) })
}
