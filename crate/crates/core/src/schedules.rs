//! Optimal marginal tax and prize schedules and their integrated totals.
//!
//! All four schedules share one structure. With `G` the average welfare
//! weight above the point, `alpha` the local Pareto parameter and `e` the
//! supply elasticity:
//!
//! | kind              | marginal                                   |
//! |-------------------|--------------------------------------------|
//! | wage tax          | `(1 - G) / (1 - G + alpha e)`              |
//! | innovation prize  | `alpha e G* / (1 - G + alpha e G*)`        |
//! | mineral prize     | `alpha e / (1 - G + alpha e)`              |
//! | monopoly prize    | `alpha e / (1 - G + alpha e)`              |
//!
//! With `G* = 1` the innovation prize marginal is one minus the wage tax
//! marginal: the prize plays the role of the after-tax wage.
//!
//! Prize totals reimburse the full value up to `floor_multiplier *
//! creation_cost` and integrate the marginal from there on.

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionModel, ElasticityProfile, WeightFamily, WelfareWeightProfile};
use crate::error::{Error, Result};

/// Slack above 1 tolerated in the average weight before a point is flagged
/// out of regime.
pub const REGIME_TOL: f64 = 1e-9;

/// Default multiple of creation cost reimbursed in full.
pub const DEFAULT_FLOOR_MULTIPLIER: f64 = 3.0;

/// Richardson criterion for the adaptive trapezoid rule, relative to the
/// running total.
const TRAPEZOID_REL_TOL: f64 = 1e-7;
const TRAPEZOID_ABS_TOL: f64 = 1e-10;
const MAX_TRAPEZOID_LEVELS: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    WageTax,
    InnovationPrize,
    MineralPrize,
    MonopolyPrize,
}

impl ScheduleKind {
    pub fn is_prize(self) -> bool {
        !matches!(self, ScheduleKind::WageTax)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScheduleKind::WageTax => "wage_tax",
            ScheduleKind::InnovationPrize => "innovation_prize",
            ScheduleKind::MineralPrize => "mineral_prize",
            ScheduleKind::MonopolyPrize => "monopoly_prize",
        }
    }
}

/// How a schedule point was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Inside the cost-reimbursement floor.
    Floor,
    Formula,
    /// Average weight above the point exceeds 1; the formula value is
    /// reported as computed.
    OutOfRegime,
    /// Below the distribution's support; inputs are taken at the floor.
    BelowSupport,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Floor => "floor",
            Regime::Formula => "formula",
            Regime::OutOfRegime => "out_of_regime",
            Regime::BelowSupport => "below_support",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginal {
    pub value: f64,
    pub regime: Regime,
}

/// Inputs shared by the four formulas at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormulaInputs {
    pub avg_weight: f64,
    pub alpha: f64,
    pub elasticity: f64,
    pub benefit_weight: f64,
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den > 0.0 && den.is_finite() {
        Ok(num / den)
    } else {
        Err(Error::DegenerateDenominator { x: f64::NAN, denominator: den })
    }
}

pub fn wage_tax_marginal(avg_weight: f64, alpha: f64, elasticity: f64) -> Result<f64> {
    let redistribution = 1.0 - avg_weight;
    ratio(redistribution, redistribution + alpha * elasticity)
}

pub fn innovation_prize_marginal(avg_weight: f64, alpha: f64, elasticity: f64, benefit_weight: f64) -> Result<f64> {
    let supply = alpha * elasticity * benefit_weight;
    ratio(supply, 1.0 - avg_weight + supply)
}

pub fn mineral_prize_marginal(avg_weight: f64, alpha: f64, elasticity: f64) -> Result<f64> {
    let supply = alpha * elasticity;
    ratio(supply, 1.0 - avg_weight + supply)
}

pub fn monopoly_prize_marginal(avg_weight: f64, alpha: f64, elasticity: f64) -> Result<f64> {
    let supply = alpha * elasticity;
    ratio(supply, 1.0 - avg_weight + supply)
}

/// Evaluates the formula for `kind` on precomputed inputs.
pub fn formula(kind: ScheduleKind, inputs: &FormulaInputs) -> Result<f64> {
    let FormulaInputs { avg_weight, alpha, elasticity, benefit_weight } = *inputs;
    match kind {
        ScheduleKind::WageTax => wage_tax_marginal(avg_weight, alpha, elasticity),
        ScheduleKind::InnovationPrize => innovation_prize_marginal(avg_weight, alpha, elasticity, benefit_weight),
        ScheduleKind::MineralPrize => mineral_prize_marginal(avg_weight, alpha, elasticity),
        ScheduleKind::MonopolyPrize => monopoly_prize_marginal(avg_weight, alpha, elasticity),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleParams {
    pub kind: ScheduleKind,
    pub distribution: DistributionModel,
    pub weights: WelfareWeightProfile,
    pub elasticity: ElasticityProfile,
    pub floor_multiplier: f64,
    pub creation_cost: f64,
}

impl ScheduleParams {
    pub fn new(
        kind: ScheduleKind,
        distribution: DistributionModel,
        weights: WelfareWeightProfile,
        elasticity: ElasticityProfile,
    ) -> Result<Self> {
        let params = Self {
            kind,
            distribution,
            weights,
            elasticity,
            floor_multiplier: DEFAULT_FLOOR_MULTIPLIER,
            creation_cost: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_floor(mut self, floor_multiplier: f64, creation_cost: f64) -> Result<Self> {
        self.floor_multiplier = floor_multiplier;
        self.creation_cost = creation_cost;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.floor_multiplier >= 0.0 && self.floor_multiplier.is_finite()) {
            return Err(Error::domain("floor multiplier must be finite and >= 0"));
        }
        if !(self.creation_cost >= 0.0 && self.creation_cost.is_finite()) {
            return Err(Error::domain("creation cost must be finite and >= 0"));
        }
        self.elasticity.validate()
    }

    /// End of the full-reimbursement region, for prize kinds.
    pub fn junction(&self) -> Option<f64> {
        self.kind.is_prize().then_some(self.floor_multiplier * self.creation_cost)
    }

    /// Average weight, local Pareto parameter and elasticity at `x`. Points
    /// below the support floor take their inputs from the floor.
    pub fn inputs_at(&self, x: f64) -> Result<(FormulaInputs, bool)> {
        let floor = self.distribution.support_floor();
        let below = x < floor;
        let at = if below { floor } else { x };
        let inputs = FormulaInputs {
            avg_weight: self.weights.avg_weight_above(&self.distribution, at)?,
            alpha: self.distribution.local_pareto_parameter(at)?,
            elasticity: self.elasticity.at(at),
            benefit_weight: self.weights.benefit_weight(),
        };
        Ok((inputs, below))
    }

    fn marginal_as(&self, kind: ScheduleKind, x: f64) -> Result<Marginal> {
        let (inputs, below) = self.inputs_at(x)?;
        let value = formula(kind, &inputs).map_err(|e| match e {
            Error::DegenerateDenominator { denominator, .. } => Error::DegenerateDenominator { x, denominator },
            other => other,
        })?;
        let regime = if below {
            Regime::BelowSupport
        } else if inputs.avg_weight > 1.0 + REGIME_TOL {
            Regime::OutOfRegime
        } else {
            Regime::Formula
        };
        Ok(Marginal { value, regime })
    }

    /// The formula marginal for this schedule's kind, ignoring the floor.
    pub fn marginal(&self, x: f64) -> Result<Marginal> {
        self.marginal_as(self.kind, x)
    }

    /// Total tax or prize at a single value.
    ///
    /// Prizes paid period by period use the same schedule evaluated on the
    /// per-period value flow.
    pub fn total_at(&self, x: f64) -> Result<f64> {
        if let Some(x0) = self.junction() {
            if x <= x0 {
                return Ok(x);
            }
        }
        let s = integrate_schedule(self, &[x])?;
        Ok(s.totals[0])
    }

    /// Points where the marginal may have a kink or jump.
    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.distribution.breakpoints();
        if let ElasticityProfile::Piecewise { breakpoints, .. } = &self.elasticity {
            b.extend_from_slice(breakpoints);
        }
        if let WeightFamily::Step { threshold, .. } = self.weights.family() {
            b.push(*threshold);
        }
        b.push(self.distribution.support_floor());
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

pub fn marginal_wage_tax(params: &ScheduleParams, z: f64) -> Result<Marginal> {
    params.marginal_as(ScheduleKind::WageTax, z)
}

pub fn marginal_innovation_prize(params: &ScheduleParams, s: f64) -> Result<Marginal> {
    params.marginal_as(ScheduleKind::InnovationPrize, s)
}

pub fn marginal_mineral_prize(params: &ScheduleParams, u: f64) -> Result<Marginal> {
    params.marginal_as(ScheduleKind::MineralPrize, u)
}

pub fn marginal_monopoly_prize(params: &ScheduleParams, v: f64) -> Result<Marginal> {
    params.marginal_as(ScheduleKind::MonopolyPrize, v)
}

/// A schedule tabulated on a grid: totals, marginals and regime flags.
///
/// Between grid points totals follow the cubic Hermite interpolant of
/// `(total, marginal)`, and [`IntegratedSchedule::marginal_at`] is its exact
/// derivative, so the two stay consistent for optimizers.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedSchedule {
    kind: ScheduleKind,
    grid: Vec<f64>,
    totals: Vec<f64>,
    marginals: Vec<f64>,
    regimes: Vec<Regime>,
    junction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleRow {
    pub x: f64,
    pub marginal: f64,
    pub total: f64,
    pub regime: Regime,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("schedule grid is empty"));
    }
    if grid.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::domain("schedule grid values must be finite and >= 0"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("schedule grid must be strictly increasing"));
    }
    Ok(())
}

impl IntegratedSchedule {
    /// Builds a schedule from tabulated values. Regimes default to
    /// [`Regime::Formula`] (or [`Regime::Floor`] up to the junction).
    pub fn from_parts(
        kind: ScheduleKind,
        grid: Vec<f64>,
        totals: Vec<f64>,
        marginals: Vec<f64>,
        junction: Option<f64>,
    ) -> Result<Self> {
        check_grid(&grid)?;
        if totals.len() != grid.len() || marginals.len() != grid.len() {
            return Err(Error::domain("grid, totals and marginals must have equal length"));
        }
        if totals.iter().chain(&marginals).any(|v| !v.is_finite()) {
            return Err(Error::domain("totals and marginals must be finite"));
        }
        let regimes = grid
            .iter()
            .map(|&x| match junction {
                Some(x0) if x < x0 => Regime::Floor,
                _ => Regime::Formula,
            })
            .collect();
        Ok(Self { kind, grid, totals, marginals, regimes, junction })
    }

    /// Linear prize `P(s) = rate * s` tabulated on `points` nodes over
    /// `[0, upper]`.
    pub fn linear(rate: f64, upper: f64, points: usize) -> Result<Self> {
        if points < 2 || !(upper > 0.0) {
            return Err(Error::domain("linear schedule needs upper > 0 and at least 2 points"));
        }
        let grid: Vec<f64> = (0..points).map(|i| upper * i as f64 / (points - 1) as f64).collect();
        let totals = grid.iter().map(|x| rate * x).collect();
        Self::from_parts(ScheduleKind::InnovationPrize, grid, totals, vec![rate; points], None)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn totals(&self) -> &[f64] {
        &self.totals
    }

    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    pub fn regimes(&self) -> &[Regime] {
        &self.regimes
    }

    pub fn junction(&self) -> Option<f64> {
        self.junction
    }

    /// Range of values the schedule covers.
    pub fn domain(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    pub fn rows(&self) -> Vec<ScheduleRow> {
        (0..self.grid.len())
            .map(|i| ScheduleRow {
                x: self.grid[i],
                marginal: self.marginals[i],
                total: self.totals[i],
                regime: self.regimes[i],
            })
            .collect()
    }

    fn in_floor(&self, x: f64) -> bool {
        matches!(self.junction, Some(x0) if x <= x0)
    }

    fn segment(&self, x: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::domain(format!("{x} lies outside the schedule domain [{lo}, {hi}]")));
        }
        Ok(self.grid.partition_point(|&g| g <= x).saturating_sub(1).min(self.grid.len().saturating_sub(2)))
    }

    /// Total at `x`, exact inside the floor and Hermite-interpolated elsewhere.
    pub fn total_at(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        if self.in_floor(x) {
            return Ok(x);
        }
        if self.grid.len() == 1 {
            return Ok(self.totals[0]);
        }
        let h = self.grid[i + 1] - self.grid[i];
        let t = (x - self.grid[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.totals[i] + h10 * h * self.marginals[i] + h01 * self.totals[i + 1] + h11 * h * self.marginals[i + 1])
    }

    /// Derivative of [`IntegratedSchedule::total_at`].
    pub fn marginal_at(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        if self.in_floor(x) {
            return Ok(1.0);
        }
        if self.grid.len() == 1 {
            return Ok(self.marginals[0]);
        }
        let h = self.grid[i + 1] - self.grid[i];
        let t = (x - self.grid[i]) / h;
        let t2 = t * t;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        Ok((d00 * self.totals[i] + d01 * self.totals[i + 1]) / h + d10 * self.marginals[i] + d11 * self.marginals[i + 1])
    }
}

/// Trapezoid rule on `[a, b]`, doubling the node count until successive
/// estimates agree. `right` is evaluated in place of `f(b)` so a jump at `b`
/// uses the left limit.
fn adaptive_trapezoid<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, fa: f64, fb: f64, scale: f64) -> Result<f64> {
    // Positive pieces are integrated in ln x, where the marginal varies on a
    // uniform scale.
    let log = a > 0.0;
    let (ua, ub) = if log { (a.ln(), b.ln()) } else { (a, b) };
    let (ga, gb) = if log { (fa * a, fb * b) } else { (fa, fb) };
    let g = |u: f64| -> Result<f64> {
        if log {
            let x = u.exp();
            Ok(f(x)? * x)
        } else {
            f(u)
        }
    };
    let width = ub - ua;
    let tol_abs = TRAPEZOID_ABS_TOL * (b - a);
    let mut n: u64 = 1;
    let mut estimate = 0.5 * width * (ga + gb);
    let mut change = f64::INFINITY;
    for level in 1..=MAX_TRAPEZOID_LEVELS {
        let h = width / (2 * n) as f64;
        let mut mid_sum = 0.0;
        for k in 0..n {
            mid_sum += g(ua + (2 * k + 1) as f64 * h)?;
        }
        let refined = 0.5 * estimate + h * mid_sum;
        let delta = refined - estimate;
        change = delta.abs();
        estimate = refined;
        n *= 2;
        if level >= 2 && change <= tol_abs + TRAPEZOID_REL_TOL * (scale + estimate.abs()) {
            // one Richardson step removes the h^2 error term
            return Ok(estimate + delta / 3.0);
        }
    }
    Err(Error::NoConvergence { what: "adaptive trapezoid", estimate: change })
}

/// Tabulates totals and marginals of `params` on `grid`.
///
/// Prize totals equal the value up to the junction `m * cost` and integrate
/// the marginal beyond it; the junction is inserted as a grid node when it
/// falls strictly inside the grid. Wage-tax totals integrate from zero.
pub fn integrate_schedule(params: &ScheduleParams, grid: &[f64]) -> Result<IntegratedSchedule> {
    check_grid(grid)?;
    params.validate()?;
    let junction = params.junction();
    let mut nodes = grid.to_vec();
    if let Some(x0) = junction {
        if x0 > nodes[0] && x0 < nodes[nodes.len() - 1] && !nodes.contains(&x0) {
            let at = nodes.partition_point(|&g| g < x0);
            nodes.insert(at, x0);
        }
    }
    let (anchor, mut running) = match junction {
        Some(x0) => (x0, x0),
        None => (0.0, 0.0),
    };
    let breaks = params.breakpoints();
    let value_at = |x: f64| params.marginal(x).map(|m| m.value);

    let mut totals = Vec::with_capacity(nodes.len());
    let mut marginals = Vec::with_capacity(nodes.len());
    let mut regimes = Vec::with_capacity(nodes.len());
    let mut cursor = anchor;
    for &x in &nodes {
        if junction.is_some_and(|x0| x < x0) {
            totals.push(x);
            marginals.push(1.0);
            regimes.push(Regime::Floor);
            continue;
        }
        let m = params.marginal(x).map_err(|e| Error::at_grid_point(x, e))?;
        if x > cursor {
            // split at every kink so each piece is smooth
            let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| b > cursor && b < x).collect();
            cuts.push(x);
            let mut left = cursor;
            let mut f_left = value_at(left).map_err(|e| Error::at_grid_point(x, e))?;
            for &right in &cuts {
                let f_right = if right == x { m.value } else { value_at(right.next_down()).map_err(|e| Error::at_grid_point(x, e))? };
                let piece = adaptive_trapezoid(&value_at, left, right, f_left, f_right, running.abs())
                    .map_err(|e| Error::at_grid_point(x, e))?;
                running += piece;
                left = right;
                f_left = if right == x { m.value } else { value_at(right).map_err(|e| Error::at_grid_point(x, e))? };
            }
            cursor = x;
        }
        totals.push(running);
        marginals.push(m.value);
        regimes.push(m.regime);
    }
    Ok(IntegratedSchedule { kind: params.kind, grid: nodes, totals, marginals, regimes, junction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pareto_params(kind: ScheduleKind, nu: f64, e: f64) -> ScheduleParams {
        let m = DistributionModel::pareto(1.0, 2.0).unwrap();
        let g = WelfareWeightProfile::normalized(WeightFamily::Power { nu }, 1.0, &m).unwrap();
        ScheduleParams::new(kind, m, g, ElasticityProfile::constant(e)).unwrap()
    }

    /// Simpson quadrature of the conditional mean of c/x above z under
    /// Pareto(1, 2), after substituting x = z / u on u in (0, 1].
    fn inverse_weight_avg_above(z: f64) -> f64 {
        // normalization: c * E[1/X] = 1 with E[1/X] = ∫_1^∞ 2 x^-4 dx
        let n = 20_000;
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| {
            let h = (b - a) / n as f64;
            let mut s = f(a) + f(b);
            for i in 1..n {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
            }
            s * h / 3.0
        };
        // ∫_z^∞ 2 x^-4 dx = ∫_0^1 2 (z/u)^-4 z/u^2 du = ∫_0^1 2 z^-3 u^2 du
        let inv_mean = simpson(&|u: f64| 2.0 * u * u, 0.0, 1.0);
        let c = 1.0 / inv_mean;
        let above = simpson(&|u: f64| 2.0 * z.powi(-3) * u * u, 0.0, 1.0);
        let survival = simpson(&|u: f64| 2.0 * z.powi(-2) * u, 0.0, 1.0);
        c * above / survival
    }

    #[test]
    fn wage_tax_examples() {
        assert_eq!(wage_tax_marginal(1.0, 2.0, 0.5).unwrap(), 0.0);
        assert_eq!(wage_tax_marginal(0.0, 1.0, 1.0).unwrap(), 0.5);
        // composed example, frozen from the hand quadrature: G = 0.5, alpha e = 0.5
        let g_oracle = inverse_weight_avg_above(2.0);
        assert!((g_oracle - 0.5).abs() < 1e-10);
        let expected = (1.0 - g_oracle) / (1.0 - g_oracle + 2.0 * 0.25);
        let p = pareto_params(ScheduleKind::WageTax, 1.0, 0.25);
        let m = marginal_wage_tax(&p, 2.0).unwrap();
        assert!((m.value - expected).abs() < 1e-8);
        assert!((m.value - 0.5).abs() < 1e-8);
        assert_eq!(m.regime, Regime::Formula);
    }

    #[test]
    fn innovation_examples() {
        assert_eq!(innovation_prize_marginal(1.0, 2.0, 0.3, 1.0).unwrap(), 1.0);
        assert_eq!(innovation_prize_marginal(0.4, 2.0, 0.0, 1.0).unwrap(), 0.0);
        for i in 0..50 {
            let g = i as f64 / 50.0;
            let (a, e) = (1.0 + i as f64 * 0.1, 0.05 * i as f64);
            let t = wage_tax_marginal(g, a, e).unwrap();
            let p = innovation_prize_marginal(g, a, e, 1.0).unwrap();
            assert!((p - (1.0 - t)).abs() < 1e-12);
        }
    }

    #[test]
    fn mineral_and_monopoly_examples() {
        assert_eq!(mineral_prize_marginal(1.0, 1.5, 0.2).unwrap(), 1.0);
        assert_eq!(mineral_prize_marginal(0.3, 1.5, 0.0).unwrap(), 0.0);
        assert_eq!(monopoly_prize_marginal(1.0, 1.5, 0.2).unwrap(), 1.0);
        assert_eq!(monopoly_prize_marginal(0.3, 1.5, 0.0).unwrap(), 0.0);
        for i in 0..40 {
            let g = i as f64 / 40.0;
            let (a, e) = (1.1 + 0.05 * i as f64, 0.1 + 0.02 * i as f64);
            let n = innovation_prize_marginal(g, a, e, 1.0).unwrap();
            assert_eq!(mineral_prize_marginal(g, a, e).unwrap(), n);
            assert_eq!(monopoly_prize_marginal(g, a, e).unwrap(), mineral_prize_marginal(g, a, e).unwrap());
        }
    }

    #[test]
    fn degenerate_denominator_is_an_error() {
        assert!(matches!(wage_tax_marginal(1.0, 2.0, 0.0), Err(Error::DegenerateDenominator { .. })));
        assert!(matches!(wage_tax_marginal(3.0, 1.0, 1.0), Err(Error::DegenerateDenominator { .. })));
        assert!(mineral_prize_marginal(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn rising_weights_are_flagged_out_of_regime() {
        let m = DistributionModel::pareto(1.0, 2.0).unwrap();
        let threshold = m.quantile(0.5);
        let g = WelfareWeightProfile::normalized(WeightFamily::Step { threshold, below: 1.0, above: 3.0 }, 1.0, &m).unwrap();
        let p = ScheduleParams::new(ScheduleKind::WageTax, m, g, ElasticityProfile::constant(0.5)).unwrap();
        let mk = marginal_wage_tax(&p, 3.0).unwrap();
        assert_eq!(mk.regime, Regime::OutOfRegime);
        assert!(mk.value < 0.0);
    }

    #[test]
    fn below_support_uses_floor_inputs() {
        let p = pareto_params(ScheduleKind::InnovationPrize, 1.0, 0.5);
        let m = p.marginal(0.5).unwrap();
        assert_eq!(m.regime, Regime::BelowSupport);
        assert_eq!(m.value, 1.0);
        assert_eq!(marginal_wage_tax(&p, 0.2).unwrap().value, 0.0);
    }

    #[test]
    fn tail_errors_carry_grid_point() {
        let p = pareto_params(ScheduleKind::WageTax, 1.0, 0.5);
        let err = integrate_schedule(&p, &[1.0, 1e9]).unwrap_err();
        match err {
            Error::AtGridPoint { x, source } => {
                assert_eq!(x, 1e9);
                assert!(matches!(*source, Error::TailTruncation { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn floor_region_reimburses_value() {
        let p = pareto_params(ScheduleKind::InnovationPrize, 1.0, 0.5).with_floor(3.0, 1.0).unwrap();
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let s = integrate_schedule(&p, &grid).unwrap();
        for (x, t) in s.grid().iter().zip(s.totals()) {
            if *x <= 3.0 {
                assert_eq!(t, x);
            }
        }
        assert_eq!(s.junction(), Some(3.0));
        // continuity across the junction
        let left = s.total_at(3.0).unwrap();
        let right = s.total_at(3.0 + 1e-9).unwrap();
        assert!((right - left).abs() < 1e-8);
        assert!(s.totals().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn zero_multiplier_disables_floor() {
        let p = pareto_params(ScheduleKind::MineralPrize, 1.0, 0.5).with_floor(0.0, 10.0).unwrap();
        let s = integrate_schedule(&p, &[0.5, 1.0, 2.0]).unwrap();
        // below the Pareto scale the floor inputs give a marginal of 1
        assert!((s.totals()[0] - 0.5).abs() < 1e-9);
        assert!((s.totals()[1] - 1.0).abs() < 1e-9);
        assert!(s.regimes().iter().all(|r| *r != Regime::Floor));
    }

    #[test]
    fn constant_marginal_integrates_linearly() {
        // constant weights give G = 1 at every point, hence P' = 1 past the floor
        let m = DistributionModel::pareto(1.0, 2.0).unwrap();
        let g = WelfareWeightProfile::normalized(WeightFamily::Constant, 0.5, &m).unwrap();
        let p = ScheduleParams::new(ScheduleKind::InnovationPrize, m, g, ElasticityProfile::constant(1.0))
            .unwrap()
            .with_floor(2.0, 1.0)
            .unwrap();
        let s = integrate_schedule(&p, &[1.0, 2.0, 4.0, 10.0]).unwrap();
        let rate = s.marginals()[2];
        assert_eq!(rate, 1.0);
        assert!((s.totals()[3] - (2.0 + rate * 8.0)).abs() < 1e-9);
    }

    #[test]
    fn wage_tax_totals_start_at_zero() {
        let p = pareto_params(ScheduleKind::WageTax, 1.0, 0.25);
        let s = integrate_schedule(&p, &[0.0, 1.0, 2.0, 5.0]).unwrap();
        assert_eq!(s.totals()[0], 0.0);
        assert!(s.totals()[1].abs() < 1e-12);
        assert!(s.marginals().iter().all(|m| (0.0..=1.0).contains(m)));
        assert!(s.junction().is_none());
    }

    #[test]
    fn richardson_grid_halving() {
        let p = pareto_params(ScheduleKind::InnovationPrize, 1.0, 0.4).with_floor(3.0, 0.5).unwrap();
        let coarse: Vec<f64> = (0..=20).map(|i| 1.0 + i as f64 * 0.5).collect();
        let fine: Vec<f64> = (0..=40).map(|i| 1.0 + i as f64 * 0.25).collect();
        let a = integrate_schedule(&p, &coarse).unwrap();
        let b = integrate_schedule(&p, &fine).unwrap();
        for (x, t) in a.grid().iter().zip(a.totals()) {
            let j = b.grid().iter().position(|g| g == x).unwrap();
            assert!((b.totals()[j] - t).abs() <= 1e-6 * t.abs().max(1e-12));
        }
    }

    #[test]
    fn hermite_interpolant_is_consistent() {
        let p = pareto_params(ScheduleKind::InnovationPrize, 1.0, 0.6).with_floor(3.0, 0.3).unwrap();
        let grid: Vec<f64> = (0..=30).map(|i| i as f64 * 0.4).collect();
        let s = integrate_schedule(&p, &grid).unwrap();
        for i in 1..200 {
            let x = 0.9 + i as f64 * 0.05;
            if x + 1e-6 > 12.0 {
                break;
            }
            let h = 1e-6;
            let fd = (s.total_at(x + h).unwrap() - s.total_at(x - h).unwrap()) / (2.0 * h);
            assert!((fd - s.marginal_at(x).unwrap()).abs() < 1e-5, "x = {x}");
        }
        let lin = IntegratedSchedule::linear(0.3, 10.0, 11).unwrap();
        assert!((lin.total_at(3.3).unwrap() - 0.99).abs() < 1e-14);
        assert!((lin.marginal_at(7.77).unwrap() - 0.3).abs() < 1e-14);
        assert!(lin.total_at(10.5).is_err());
    }

    #[test]
    fn grid_validation() {
        let p = pareto_params(ScheduleKind::WageTax, 1.0, 0.25);
        assert!(integrate_schedule(&p, &[]).is_err());
        assert!(integrate_schedule(&p, &[2.0, 1.0]).is_err());
        assert!(integrate_schedule(&p, &[-1.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn formulas_lie_in_unit_interval(g in 0.0..=1.0f64, a in 0.0..10.0f64, e in 0.0..5.0f64, gs in 0.0..5.0f64) {
            let inputs = FormulaInputs { avg_weight: g, alpha: a, elasticity: e, benefit_weight: gs };
            for kind in [ScheduleKind::WageTax, ScheduleKind::InnovationPrize, ScheduleKind::MineralPrize, ScheduleKind::MonopolyPrize] {
                if let Ok(v) = formula(kind, &inputs) {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
            }
        }

        #[test]
        fn comparative_statics(g in 0.0..1.0f64, a in 0.01..10.0f64, e in 0.01..5.0f64, da in 0.0..3.0f64, de in 0.0..3.0f64) {
            let base_t = wage_tax_marginal(g, a, e).unwrap();
            prop_assert!(wage_tax_marginal(g, a, e + de).unwrap() <= base_t);
            for p in [
                |g, a, e| mineral_prize_marginal(g, a, e).unwrap(),
                |g, a, e| monopoly_prize_marginal(g, a, e).unwrap(),
                |g, a, e| innovation_prize_marginal(g, a, e, 0.7).unwrap(),
            ] {
                let base = p(g, a, e);
                prop_assert!(p(g, a, e + de) >= base);
                prop_assert!(p(g, a + da, e) >= base);
            }
        }
    }
}
