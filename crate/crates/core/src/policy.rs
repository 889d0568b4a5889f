//! Per-category asset treatment and revenue reporting.
//!
//! | category                 | treatment                                              |
//! |--------------------------|--------------------------------------------------------|
//! | land / useful privilege  | recurring value tax capturing `t / (t + rho)`          |
//! | useless privilege        | abolished                                              |
//! | capital                  | untaxed, unless a one-time levy is configured          |
//! | intellectual property    | innovation prize, right extinguished (free access)     |
//! | mineral deposit          | discovery prize, remaining value by auction + severance|
//! | unregulated monopoly     | development prize, recurring tax on excess value       |

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedules::{ScheduleKind, ScheduleParams};
use crate::valuation::{captured_share, split_tax_bill, MortgagedAsset, TaxSplit, ValuationInput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssetCategory {
    LandOrUsefulPrivilege,
    UselessPrivilege,
    Capital,
    IntellectualProperty,
    MineralDeposit,
    UnregulatedNaturalMonopoly,
}

impl AssetCategory {
    pub const ALL: [AssetCategory; 6] = [
        AssetCategory::LandOrUsefulPrivilege,
        AssetCategory::UselessPrivilege,
        AssetCategory::Capital,
        AssetCategory::IntellectualProperty,
        AssetCategory::MineralDeposit,
        AssetCategory::UnregulatedNaturalMonopoly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AssetCategory::LandOrUsefulPrivilege => "land_or_useful_privilege",
            AssetCategory::UselessPrivilege => "useless_privilege",
            AssetCategory::Capital => "capital",
            AssetCategory::IntellectualProperty => "intellectual_property",
            AssetCategory::MineralDeposit => "mineral_deposit",
            AssetCategory::UnregulatedNaturalMonopoly => "unregulated_natural_monopoly",
        }
    }

    /// Sources of value and whether restricting access is efficient.
    pub fn characteristics(self) -> Characteristics {
        let c = |rent, effort, discovery, restricted_access_efficient| Characteristics {
            rent,
            effort,
            discovery,
            restricted_access_efficient,
        };
        match self {
            AssetCategory::LandOrUsefulPrivilege => c(true, false, false, true),
            AssetCategory::UselessPrivilege => c(true, false, false, false),
            AssetCategory::Capital => c(true, true, false, true),
            AssetCategory::IntellectualProperty => c(false, true, true, false),
            AssetCategory::MineralDeposit => c(true, true, true, true),
            AssetCategory::UnregulatedNaturalMonopoly => c(true, true, true, true),
        }
    }

    pub fn treatment(self) -> Treatment {
        match self {
            AssetCategory::LandOrUsefulPrivilege => Treatment::RecurringValueTax,
            AssetCategory::UselessPrivilege => Treatment::Abolish,
            AssetCategory::Capital => Treatment::Exempt,
            AssetCategory::IntellectualProperty => Treatment::PrizeWithFreeAccess,
            AssetCategory::MineralDeposit => Treatment::PrizeThenAuctionAndSeverance,
            AssetCategory::UnregulatedNaturalMonopoly => Treatment::PrizeThenExcessValueTax,
        }
    }

    /// Prize schedule kind used for this category, if any.
    pub fn prize_kind(self) -> Option<ScheduleKind> {
        match self {
            AssetCategory::IntellectualProperty => Some(ScheduleKind::InnovationPrize),
            AssetCategory::MineralDeposit => Some(ScheduleKind::MineralPrize),
            AssetCategory::UnregulatedNaturalMonopoly => Some(ScheduleKind::MonopolyPrize),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Characteristics {
    pub rent: bool,
    pub effort: bool,
    pub discovery: bool,
    pub restricted_access_efficient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Treatment {
    RecurringValueTax,
    Abolish,
    Exempt,
    PrizeWithFreeAccess,
    PrizeThenAuctionAndSeverance,
    PrizeThenExcessValueTax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreatmentFlags {
    pub taxed: bool,
    pub prized: bool,
    /// The private right is removed (abolished privilege or replaced IP).
    pub eliminated: bool,
}

impl Treatment {
    pub fn flags(self) -> TreatmentFlags {
        let f = |taxed, prized, eliminated| TreatmentFlags { taxed, prized, eliminated };
        match self {
            Treatment::RecurringValueTax => f(true, false, false),
            Treatment::Abolish => f(false, false, true),
            Treatment::Exempt => f(false, false, false),
            Treatment::PrizeWithFreeAccess => f(false, true, true),
            Treatment::PrizeThenAuctionAndSeverance | Treatment::PrizeThenExcessValueTax => f(true, true, false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreativeWork {
    pub kind: String,
    pub quantity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkKind {
    Prospecting,
    Prose,
    ChildrensProse,
    Poetry,
    Music,
    VisualArt,
}

impl FromStr for WorkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "prospecting" => WorkKind::Prospecting,
            "prose" => WorkKind::Prose,
            "childrens_prose" => WorkKind::ChildrensProse,
            "poetry" => WorkKind::Poetry,
            "music" => WorkKind::Music,
            "visual_art" => WorkKind::VisualArt,
            other => return Err(Error::UnknownWorkKind(other.to_string())),
        })
    }
}

/// Conventional unit costs for creative and exploratory work.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostConventions {
    /// Per day of prospecting.
    pub prospector_day: f64,
    pub prose_word: f64,
    pub children_prose_word: f64,
    pub poetry_word: f64,
    pub music_beat: f64,
    /// Per square inch of two-dimensional visual art.
    pub art_sq_inch: f64,
}

impl Default for CostConventions {
    fn default() -> Self {
        Self {
            prospector_day: 500.0,
            prose_word: 1.0,
            children_prose_word: 2.0,
            poetry_word: 5.0,
            music_beat: 1.0,
            art_sq_inch: 1.0,
        }
    }
}

impl CostConventions {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.prospector_day,
            self.prose_word,
            self.children_prose_word,
            self.poetry_word,
            self.music_beat,
            self.art_sq_inch,
        ];
        if all.iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::domain("cost conventions must be positive"))
        }
    }

    pub fn unit_cost(&self, kind: WorkKind) -> f64 {
        match kind {
            WorkKind::Prospecting => self.prospector_day,
            WorkKind::Prose => self.prose_word,
            WorkKind::ChildrensProse => self.children_prose_word,
            WorkKind::Poetry => self.poetry_word,
            WorkKind::Music => self.music_beat,
            WorkKind::VisualArt => self.art_sq_inch,
        }
    }
}

pub fn creation_cost(work: &CreativeWork, conventions: &CostConventions) -> Result<f64> {
    let kind: WorkKind = work.kind.parse()?;
    if !(work.quantity >= 0.0 && work.quantity.is_finite()) {
        return Err(Error::domain("work quantity must be >= 0"));
    }
    Ok(conventions.unit_cost(kind) * work.quantity)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapitalLevy {
    pub rate: f64,
    pub justification: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    /// Recurring value tax per period on land, privileges and monopoly
    /// excess value.
    pub land_tax_rate: f64,
    pub discount_rate: f64,
    pub periods_per_year: u32,
    pub floor_multiplier: f64,
    /// Share of taxes paid to the winning bidder in a competitive assessment.
    pub assessor_award_rate: f64,
    /// Share of a deposit's remaining value collected at auction; the rest
    /// is collected as severance.
    pub mineral_auction_share: f64,
    pub one_time_capital_levy: Option<CapitalLevy>,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            land_tax_rate: 0.05,
            discount_rate: 0.005,
            periods_per_year: 12,
            floor_multiplier: 3.0,
            assessor_award_rate: 0.01,
            mineral_auction_share: 0.5,
            one_time_capital_levy: None,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.land_tax_rate >= 0.0) || !(self.discount_rate > 0.0) || self.periods_per_year < 1 {
            return Err(Error::domain("need land tax rate >= 0, discount rate > 0, periods per year >= 1"));
        }
        if !(self.floor_multiplier >= 0.0) {
            return Err(Error::domain("floor multiplier must be >= 0"));
        }
        if !(0.0..1.0).contains(&self.assessor_award_rate) {
            return Err(Error::domain("assessor award rate must lie in [0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.mineral_auction_share) {
            return Err(Error::domain("mineral auction share must lie in [0, 1]"));
        }
        if let Some(levy) = &self.one_time_capital_levy {
            if !(0.0..=1.0).contains(&levy.rate) {
                return Err(Error::domain("capital levy rate must lie in [0, 1]"));
            }
            if levy.justification.trim().is_empty() {
                return Err(Error::domain("capital levy needs a justification"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssetRecord {
    pub id: String,
    pub category: AssetCategory,
    /// Pre-tax income per period.
    #[serde(default)]
    pub income_flow: f64,
    #[serde(default)]
    pub market_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub takeover_bid: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pv_net_investment: Option<f64>,
    /// Monopolies only; privately held firms are valued by competitive
    /// assessment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publicly_traded: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub creation_cost: Option<f64>,
    /// Work description priced by the cost conventions, as an alternative to
    /// `creation_cost`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work: Option<CreativeWork>,
    #[serde(default)]
    pub mortgage_value: f64,
    /// Useless privileges whose quantity restriction serves a purpose:
    /// price charged to anyone who wishes to engage in the activity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub access_fee: Option<f64>,
}

impl AssetRecord {
    pub fn new(id: impl Into<String>, category: AssetCategory) -> Self {
        Self {
            id: id.into(),
            category,
            income_flow: 0.0,
            market_value: 0.0,
            takeover_bid: None,
            pv_net_investment: None,
            publicly_traded: None,
            creation_cost: None,
            work: None,
            mortgage_value: 0.0,
            access_fee: None,
        }
    }

    /// Checks that category-specific fields are present exactly when needed.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(format!("asset `{}`: {msg}", self.id)));
        let currency = [Some(self.income_flow), Some(self.market_value), self.takeover_bid, self.pv_net_investment]
            .into_iter()
            .chain([self.creation_cost, Some(self.mortgage_value), self.access_fee])
            .flatten();
        for v in currency {
            if !(v >= 0.0 && v.is_finite()) {
                return bad("currency fields must be finite and >= 0");
            }
        }
        let monopoly = self.category == AssetCategory::UnregulatedNaturalMonopoly;
        if monopoly != (self.takeover_bid.is_some() && self.pv_net_investment.is_some())
            || (!monopoly && (self.takeover_bid.is_some() || self.pv_net_investment.is_some()))
        {
            return bad("takeover_bid and pv_net_investment are required for, and only for, monopolies");
        }
        if !monopoly && self.publicly_traded.is_some() {
            return bad("publicly_traded applies only to monopolies");
        }
        let prized = self.category.prize_kind().is_some();
        match (prized, self.creation_cost.is_some(), self.work.is_some()) {
            (true, true, true) => return bad("give creation_cost or work, not both"),
            (true, false, false) => return bad("prize categories need creation_cost or work"),
            (false, true, _) | (false, _, true) => return bad("creation cost applies only to prize categories"),
            _ => {}
        }
        if self.access_fee.is_some() && self.category != AssetCategory::UselessPrivilege {
            return bad("access_fee applies only to useless privileges");
        }
        Ok(())
    }

    pub fn resolved_creation_cost(&self, conventions: &CostConventions) -> Result<Option<f64>> {
        match (&self.work, self.creation_cost) {
            (Some(work), _) => creation_cost(work, conventions).map(Some),
            (None, cost) => Ok(cost),
        }
    }
}

/// Prize schedules available to the policy engine.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicySchedules {
    pub innovation: Option<ScheduleParams>,
    pub mineral: Option<ScheduleParams>,
    pub monopoly: Option<ScheduleParams>,
}

impl PolicySchedules {
    pub fn for_kind(&self, kind: ScheduleKind) -> Option<&ScheduleParams> {
        match kind {
            ScheduleKind::InnovationPrize => self.innovation.as_ref(),
            ScheduleKind::MineralPrize => self.mineral.as_ref(),
            ScheduleKind::MonopolyPrize => self.monopoly.as_ref(),
            ScheduleKind::WageTax => None,
        }
    }
}

/// Public revenue by channel. `property_tax` is a flow per period; the
/// others are one-time amounts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RevenueChannels {
    pub property_tax: f64,
    pub auction: f64,
    pub severance: f64,
    pub one_time_levy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreatmentResult {
    pub asset_id: String,
    pub category: AssetCategory,
    pub treatment: Treatment,
    /// Tax per period.
    pub recurring_tax_flow: f64,
    pub prize_paid: f64,
    pub residual_private_value: f64,
    pub abolished: bool,
    /// The asset's exclusive right is extinguished and access is open.
    pub free_access: bool,
    pub revenue: RevenueChannels,
    /// Award per period to the winning bidder of a competitive assessment.
    pub assessor_award: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub captured_share: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tax_split: Option<TaxSplit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excess_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub access_fee: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levy_justification: Option<String>,
}

impl TreatmentResult {
    fn blank(asset: &AssetRecord) -> Self {
        Self {
            asset_id: asset.id.clone(),
            category: asset.category,
            treatment: asset.category.treatment(),
            recurring_tax_flow: 0.0,
            prize_paid: 0.0,
            residual_private_value: 0.0,
            abolished: false,
            free_access: false,
            revenue: RevenueChannels::default(),
            assessor_award: 0.0,
            captured_share: None,
            tax_split: None,
            excess_value: None,
            access_fee: None,
            levy_justification: None,
        }
    }
}

/// `max(market_value, takeover_bid) - pv_net_investment`, clamped at zero.
pub fn monopoly_excess_value(market_value: f64, takeover_bid: f64, pv_net_investment: f64) -> f64 {
    (market_value.max(takeover_bid) - pv_net_investment).max(0.0)
}

pub fn assessor_award(taxes_collected: f64, config: &PolicyConfig) -> f64 {
    config.assessor_award_rate * taxes_collected
}

/// Spreads a discovery prize over extraction: the installment owed when
/// `extracted` units of a deposit holding `reserves` come out this period.
/// Installments sum to the lump-sum prize once the deposit is exhausted.
pub fn depletion_installment(prize: f64, extracted: f64, reserves: f64) -> Result<f64> {
    if !(prize >= 0.0 && prize.is_finite()) {
        return Err(Error::Config(format!("prize must be finite and nonnegative, got {prize}")));
    }
    if !(reserves > 0.0 && reserves.is_finite()) {
        return Err(Error::Config(format!("reserves must be positive, got {reserves}")));
    }
    if !(0.0..=reserves).contains(&extracted) {
        return Err(Error::Config(format!("extraction {extracted} outside [0, {reserves}]")));
    }
    Ok(prize * extracted / reserves)
}

fn prize_for(asset: &AssetRecord, value: f64, config: &PolicyConfig, schedules: &PolicySchedules, conventions: &CostConventions) -> Result<f64> {
    let kind = asset.category.prize_kind().expect("prize category");
    let params = schedules
        .for_kind(kind)
        .ok_or_else(|| Error::Config(format!("asset `{}`: no {} schedule configured", asset.id, kind.as_str())))?;
    let cost = asset
        .resolved_creation_cost(conventions)?
        .ok_or_else(|| Error::Config(format!("asset `{}`: missing creation cost", asset.id)))?;
    let params = params.clone().with_floor(config.floor_multiplier, cost)?;
    let prize = params.total_at(value)?;
    Ok(prize.clamp(0.0, value))
}

/// Applies the category's treatment to one asset.
pub fn apply_policy(
    asset: &AssetRecord,
    config: &PolicyConfig,
    schedules: &PolicySchedules,
    conventions: &CostConventions,
) -> Result<TreatmentResult> {
    asset.validate()?;
    config.validate()?;
    let mut out = TreatmentResult::blank(asset);
    match asset.category.treatment() {
        Treatment::RecurringValueTax => {
            let input = ValuationInput::new(asset.income_flow, config.land_tax_rate, config.discount_rate, config.periods_per_year)?;
            let value = input.value()?;
            let tax = input.tax_per_period()?;
            out.recurring_tax_flow = tax;
            out.revenue.property_tax = tax;
            out.residual_private_value = value;
            out.captured_share = Some(input.captured_share()?);
            if value > 0.0 {
                out.tax_split = Some(split_tax_bill(&MortgagedAsset {
                    asset_value: value,
                    mortgage_value: asset.mortgage_value,
                    tax_bill: tax,
                })?);
            }
        }
        Treatment::Abolish => {
            out.abolished = true;
            out.free_access = true;
            out.access_fee = asset.access_fee;
        }
        Treatment::Exempt => {
            out.residual_private_value = asset.market_value;
            if let Some(levy) = &config.one_time_capital_levy {
                let amount = levy.rate * asset.market_value;
                out.revenue.one_time_levy = amount;
                out.residual_private_value -= amount;
                out.levy_justification = Some(levy.justification.clone());
            }
        }
        Treatment::PrizeWithFreeAccess => {
            out.prize_paid = prize_for(asset, asset.market_value, config, schedules, conventions)?;
            out.free_access = true;
        }
        Treatment::PrizeThenAuctionAndSeverance => {
            let prize = prize_for(asset, asset.market_value, config, schedules, conventions)?;
            let remaining = (asset.market_value - prize).max(0.0);
            out.prize_paid = prize;
            out.revenue.auction = config.mineral_auction_share * remaining;
            out.revenue.severance = remaining - out.revenue.auction;
        }
        Treatment::PrizeThenExcessValueTax => {
            let bid = asset.takeover_bid.unwrap_or_default();
            let pvni = asset.pv_net_investment.unwrap_or_default();
            let excess = monopoly_excess_value(asset.market_value, bid, pvni);
            out.excess_value = Some(excess);
            out.prize_paid = prize_for(asset, excess, config, schedules, conventions)?;
            let tax = config.land_tax_rate * excess;
            out.recurring_tax_flow = tax;
            out.revenue.property_tax = tax;
            out.captured_share = Some(captured_share(config.land_tax_rate, config.discount_rate)?);
            out.residual_private_value = asset.market_value.max(bid);
            if asset.publicly_traded != Some(true) {
                out.assessor_award = assessor_award(tax, config);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CategoryTotals {
    pub assets: usize,
    pub property_tax_per_period: f64,
    pub assessor_awards_per_period: f64,
    pub auction: f64,
    pub severance: f64,
    pub one_time_levy: f64,
    pub prizes_paid: f64,
}

impl CategoryTotals {
    fn add(&mut self, r: &TreatmentResult) {
        self.assets += 1;
        self.property_tax_per_period += r.revenue.property_tax;
        self.assessor_awards_per_period += r.assessor_award;
        self.auction += r.revenue.auction;
        self.severance += r.revenue.severance;
        self.one_time_levy += r.revenue.one_time_levy;
        self.prizes_paid += r.prize_paid;
    }

    /// Property tax net of assessor awards, per period.
    pub fn net_recurring(&self) -> f64 {
        self.property_tax_per_period - self.assessor_awards_per_period
    }

    /// One-time revenue net of prizes.
    pub fn net_lump_sum(&self) -> f64 {
        self.auction + self.severance + self.one_time_levy - self.prizes_paid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelfareSummary {
    /// Weighted prizes net of one-time levies.
    pub weighted_lump_sum_transfer: f64,
    /// Weighted recurring taxes paid, as a negative transfer per period.
    pub weighted_recurring_transfer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevenueReport {
    pub by_category: BTreeMap<AssetCategory, CategoryTotals>,
    pub totals: CategoryTotals,
    pub net_recurring_revenue_per_period: f64,
    pub net_lump_sum_revenue: f64,
    pub abolished: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub welfare: Option<WelfareSummary>,
}

/// Aggregates treatment results. Results are folded in asset-id order.
pub fn revenue_report(results: &[TreatmentResult], recipient_weights: Option<&BTreeMap<AssetCategory, f64>>) -> RevenueReport {
    let mut ordered: Vec<&TreatmentResult> = results.iter().collect();
    ordered.sort_by(|a, b| a.asset_id.cmp(&b.asset_id));
    let mut by_category = BTreeMap::new();
    let mut totals = CategoryTotals::default();
    let mut abolished = Vec::new();
    for r in &ordered {
        by_category.entry(r.category).or_insert_with(CategoryTotals::default).add(r);
        totals.add(r);
        if r.abolished {
            abolished.push(r.asset_id.clone());
        }
    }
    let welfare = recipient_weights.map(|w| {
        let mut s = WelfareSummary { weighted_lump_sum_transfer: 0.0, weighted_recurring_transfer: 0.0 };
        for r in &ordered {
            let weight = w.get(&r.category).copied().unwrap_or(1.0);
            s.weighted_lump_sum_transfer += weight * (r.prize_paid - r.revenue.one_time_levy);
            s.weighted_recurring_transfer -= weight * r.recurring_tax_flow;
        }
        s
    });
    RevenueReport {
        by_category,
        net_recurring_revenue_per_period: totals.net_recurring(),
        net_lump_sum_revenue: totals.net_lump_sum(),
        totals,
        abolished,
        welfare,
    }
}

/// Everything the engine needs to process a set of assets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicyScenario {
    pub assets: Vec<AssetRecord>,
    pub config: PolicyConfig,
    pub schedules: PolicySchedules,
    pub conventions: CostConventions,
    pub recipient_weights: Option<BTreeMap<AssetCategory, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyOutcome {
    pub results: Vec<TreatmentResult>,
    pub report: RevenueReport,
}

impl PolicyScenario {
    pub fn evaluate(&self) -> Result<PolicyOutcome> {
        let mut results = self
            .assets
            .iter()
            .map(|a| apply_policy(a, &self.config, &self.schedules, &self.conventions))
            .collect::<Result<Vec<_>>>()?;
        results.sort_by(|a, b| a.asset_id.cmp(&b.asset_id));
        let report = revenue_report(&results, self.recipient_weights.as_ref());
        Ok(PolicyOutcome { results, report })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{DistributionModel, ElasticityProfile, WeightFamily, WelfareWeightProfile};

    fn schedules() -> PolicySchedules {
        let m = DistributionModel::pareto(1000.0, 2.0).unwrap();
        let g = WelfareWeightProfile::normalized(WeightFamily::Power { nu: 0.5 }, 1.0, &m).unwrap();
        let params = |kind| ScheduleParams::new(kind, m.clone(), g.clone(), ElasticityProfile::constant(0.5)).unwrap();
        PolicySchedules {
            innovation: Some(params(ScheduleKind::InnovationPrize)),
            mineral: Some(params(ScheduleKind::MineralPrize)),
            monopoly: Some(params(ScheduleKind::MonopolyPrize)),
        }
    }

    fn land(id: &str, rent: f64) -> AssetRecord {
        AssetRecord { income_flow: rent, ..AssetRecord::new(id, AssetCategory::LandOrUsefulPrivilege) }
    }

    fn apply(a: &AssetRecord) -> TreatmentResult {
        apply_policy(a, &PolicyConfig::default(), &schedules(), &CostConventions::default()).unwrap()
    }

    #[test]
    fn land_captures_ten_elevenths() {
        let r = apply(&land("p1", 110.0));
        assert!((r.recurring_tax_flow - 100.0).abs() < 1e-9);
        assert!((r.recurring_tax_flow / 110.0 - 10.0 / 11.0).abs() < 1e-10);
        assert!((r.captured_share.unwrap() - 10.0 / 11.0).abs() < 1e-12);
        assert!((r.residual_private_value - 2000.0).abs() < 1e-9);
    }

    #[test]
    fn land_tax_bill_is_split_with_mortgagor() {
        let r = apply(&AssetRecord { mortgage_value: 500.0, ..land("p2", 110.0) });
        let split = r.tax_split.unwrap();
        assert!((split.mortgagor_portion - 25.0).abs() < 1e-9);
        assert_eq!(split.owner_portion + split.mortgagor_portion, r.recurring_tax_flow);
    }

    #[test]
    fn useless_privilege_is_abolished() {
        let a = AssetRecord { income_flow: 50.0, market_value: 9000.0, ..AssetRecord::new("medallion", AssetCategory::UselessPrivilege) };
        let r = apply(&a);
        assert!(r.abolished);
        assert_eq!(r.revenue, RevenueChannels::default());
        assert_eq!(r.prize_paid, 0.0);
        assert_eq!(r.recurring_tax_flow, 0.0);
        let fee = apply(&AssetRecord { access_fee: Some(12.0), ..a });
        assert_eq!(fee.access_fee, Some(12.0));
        assert_eq!(fee.revenue, RevenueChannels::default());
    }

    #[test]
    fn capital_is_untaxed_without_levy() {
        let a = AssetRecord { income_flow: 10.0, market_value: 1000.0, ..AssetRecord::new("mill", AssetCategory::Capital) };
        let r = apply(&a);
        assert_eq!(r.recurring_tax_flow, 0.0);
        assert_eq!(r.revenue, RevenueChannels::default());
        let config = PolicyConfig {
            one_time_capital_levy: Some(CapitalLevy { rate: 0.1, justification: "reparations".into() }),
            ..PolicyConfig::default()
        };
        let r = apply_policy(&a, &config, &schedules(), &CostConventions::default()).unwrap();
        assert_eq!(r.revenue.one_time_levy, 100.0);
        assert_eq!(r.recurring_tax_flow, 0.0);
        assert_eq!(r.levy_justification.as_deref(), Some("reparations"));
    }

    #[test]
    fn intellectual_property_gets_prize_and_free_access() {
        let a = AssetRecord {
            market_value: 2500.0,
            work: Some(CreativeWork { kind: "poetry".into(), quantity: 100.0 }),
            ..AssetRecord::new("poem", AssetCategory::IntellectualProperty)
        };
        let r = apply(&a);
        // cost 500, floor 1500: value above the floor earns less than itself
        assert!(r.prize_paid > 1500.0 && r.prize_paid < 2500.0);
        assert!(r.free_access);
        assert_eq!(r.residual_private_value, 0.0);
        let small = AssetRecord { market_value: 1200.0, ..a };
        assert_eq!(apply(&small).prize_paid, 1200.0);
    }

    #[test]
    fn mineral_remainder_goes_to_auction_and_severance() {
        let a = AssetRecord {
            market_value: 100_000.0,
            work: Some(CreativeWork { kind: "prospecting".into(), quantity: 10.0 }),
            ..AssetRecord::new("lode", AssetCategory::MineralDeposit)
        };
        let r = apply(&a);
        assert!(r.prize_paid >= 15_000.0 && r.prize_paid < 100_000.0);
        let remaining = 100_000.0 - r.prize_paid;
        assert!((r.revenue.auction - remaining / 2.0).abs() < 1e-9);
        assert!((r.revenue.auction + r.revenue.severance - remaining).abs() < 1e-9);
    }

    #[test]
    fn monopoly_taxes_excess_value() {
        let a = AssetRecord {
            market_value: 100_000.0,
            takeover_bid: Some(120_000.0),
            pv_net_investment: Some(80_000.0),
            publicly_traded: Some(false),
            creation_cost: Some(2_000.0),
            ..AssetRecord::new("platform", AssetCategory::UnregulatedNaturalMonopoly)
        };
        let r = apply(&a);
        assert_eq!(r.excess_value, Some(40_000.0));
        assert!((r.recurring_tax_flow - 2_000.0).abs() < 1e-9);
        assert!((r.assessor_award - 20.0).abs() < 1e-9);
        assert!(r.prize_paid <= 40_000.0);
        let traded = apply(&AssetRecord { publicly_traded: Some(true), ..a });
        assert_eq!(traded.assessor_award, 0.0);
    }

    #[test]
    fn excess_value_examples() {
        assert_eq!(monopoly_excess_value(100.0, 120.0, 80.0), 40.0);
        assert_eq!(monopoly_excess_value(120.0, 100.0, 80.0), 40.0);
        assert_eq!(monopoly_excess_value(100.0, 90.0, 100.0), 0.0);
        assert_eq!(monopoly_excess_value(50.0, 40.0, 80.0), 0.0);
    }

    #[test]
    fn cost_convention_examples() {
        let c = CostConventions::default();
        let work = |kind: &str, quantity| CreativeWork { kind: kind.into(), quantity };
        assert_eq!(creation_cost(&work("poetry", 1000.0), &c).unwrap(), 5000.0);
        assert_eq!(creation_cost(&work("prospecting", 10.0), &c).unwrap(), 5000.0);
        assert_eq!(creation_cost(&work("music", 0.0), &c).unwrap(), 0.0);
        assert_eq!(creation_cost(&work("childrens_prose", 10.0), &c).unwrap(), 20.0);
        assert!(matches!(creation_cost(&work("sculpture", 1.0), &c), Err(Error::UnknownWorkKind(_))));
    }

    #[test]
    fn assessor_award_examples() {
        let c = PolicyConfig::default();
        assert_eq!(assessor_award(1000.0, &c), 10.0);
        assert_eq!(assessor_award(0.0, &c), 0.0);
        let c2 = PolicyConfig { assessor_award_rate: 0.02, ..c };
        assert_eq!(assessor_award(250.0, &c2), 5.0);
        assert_eq!(assessor_award(500.0, &c2), 2.0 * assessor_award(250.0, &c2));
    }

    #[test]
    fn prize_category_needs_schedule_and_cost() {
        let a = AssetRecord { market_value: 10.0, creation_cost: Some(1.0), ..AssetRecord::new("x", AssetCategory::IntellectualProperty) };
        let err = apply_policy(&a, &PolicyConfig::default(), &PolicySchedules::default(), &CostConventions::default());
        assert!(matches!(err, Err(Error::Config(_))));
        let no_cost = AssetRecord { creation_cost: None, ..a };
        assert!(matches!(no_cost.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn category_fields_are_checked() {
        let mut a = land("p", 1.0);
        a.takeover_bid = Some(1.0);
        assert!(a.validate().is_err());
        let mut m = AssetRecord::new("m", AssetCategory::UnregulatedNaturalMonopoly);
        m.creation_cost = Some(1.0);
        assert!(m.validate().is_err());
        let mut l = land("q", 1.0);
        l.creation_cost = Some(1.0);
        assert!(l.validate().is_err());
        let neg = land("n", -1.0);
        assert!(neg.validate().is_err());
    }

    #[test]
    fn table_of_characteristics() {
        // (category, rent, effort, discovery, restricted access efficient)
        let table = [
            (AssetCategory::LandOrUsefulPrivilege, true, false, false, true),
            (AssetCategory::UselessPrivilege, true, false, false, false),
            (AssetCategory::Capital, true, true, false, true),
            (AssetCategory::IntellectualProperty, false, true, true, false),
            (AssetCategory::MineralDeposit, true, true, true, true),
            (AssetCategory::UnregulatedNaturalMonopoly, true, true, true, true),
        ];
        for (cat, rent, effort, discovery, restricted) in table {
            let c = cat.characteristics();
            assert_eq!((c.rent, c.effort, c.discovery, c.restricted_access_efficient), (rent, effort, discovery, restricted));
            let flags = cat.treatment().flags();
            let expect_taxed = rent && restricted && cat != AssetCategory::Capital;
            assert_eq!(flags.taxed, expect_taxed, "{cat:?}");
            assert_eq!(flags.prized, discovery, "{cat:?}");
            assert_eq!(flags.eliminated, !restricted, "{cat:?}");
        }
    }

    #[test]
    fn report_aggregates() {
        let empty = revenue_report(&[], None);
        assert_eq!(empty.totals, CategoryTotals::default());
        assert_eq!(empty.net_recurring_revenue_per_period, 0.0);
        assert!(empty.abolished.is_empty());

        let single = apply(&land("p1", 110.0));
        let rep = revenue_report(std::slice::from_ref(&single), None);
        assert_eq!(rep.totals.property_tax_per_period, single.recurring_tax_flow);

        let scenario = PolicyScenario {
            assets: vec![
                land("b", 220.0),
                land("a", 110.0),
                AssetRecord::new("z", AssetCategory::UselessPrivilege),
                AssetRecord { market_value: 10.0, ..AssetRecord::new("c", AssetCategory::Capital) },
            ],
            schedules: schedules(),
            recipient_weights: Some(BTreeMap::from([(AssetCategory::LandOrUsefulPrivilege, 0.5)])),
            ..PolicyScenario::default()
        };
        let out = scenario.evaluate().unwrap();
        let ids: Vec<_> = out.results.iter().map(|r| r.asset_id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c", "z"]);
        let sum: f64 = out.results.iter().map(|r| r.revenue.property_tax).sum();
        assert!((out.report.totals.property_tax_per_period - sum).abs() < 1e-9);
        let cat_sum: f64 = out.report.by_category.values().map(|c| c.property_tax_per_period).sum();
        assert!((cat_sum - sum).abs() < 1e-9);
        assert_eq!(out.report.abolished, vec!["z".to_string()]);
        let w = out.report.welfare.unwrap();
        assert!((w.weighted_recurring_transfer + 0.5 * 300.0).abs() < 1e-9);
    }

    #[test]
    fn depletion_installments_add_up_to_the_prize() {
        let prize = 12_345.0;
        let paid: f64 = [10.0, 25.0, 40.0, 25.0].iter().map(|q| depletion_installment(prize, *q, 100.0).unwrap()).sum();
        assert!((paid - prize).abs() < 1e-9);
        assert!(depletion_installment(prize, 101.0, 100.0).is_err());
        assert!(depletion_installment(prize, 1.0, 0.0).is_err());
    }
}
