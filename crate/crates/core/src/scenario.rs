//! Scenario files: a TOML document with named sections that refer to each
//! other by name.
//!
//! ```toml
//! [distributions.values]
//! kind = "pareto"
//! scale = 1000.0
//! shape = 2.0
//!
//! [weights.flat]
//! family = "constant"
//!
//! [elasticities.base]
//! kind = "constant"
//! value = 0.5
//!
//! [schedules.innovation]
//! kind = "innovation_prize"
//! distribution = "values"
//! weights = "flat"
//! elasticity = "base"
//! creation_cost = 1000.0
//! grid = "0:20000:81"
//! ```
//!
//! Unknown keys are rejected while parsing. Everything else (references,
//! parameter ranges, category fields) is checked afterwards and reported all
//! at once.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agents::AgentProfile;
use crate::distributions::{DistributionKind, DistributionModel, ElasticityProfile, WeightFamily, WelfareWeightProfile};
use crate::error::Error;
use crate::policy::{AssetCategory, AssetRecord, CostConventions, PolicyConfig, PolicyScenario, PolicySchedules};
use crate::schedules::{ScheduleKind, ScheduleParams, DEFAULT_FLOOR_MULTIPLIER, REGIME_TOL};
use crate::valuation::ValuationInput;

/// The scenario used when none is given on the command line.
pub const REFERENCE_SCENARIO: &str = include_str!("../scenarios/reference.scenario");

/// Evenly spaced points written `start:stop:n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(start: f64, stop: f64, n: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::Config("grid needs at least one point".into()));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if n > 1 && !(stop > start) {
            return Err(Error::Config("grid stop must exceed start".into()));
        }
        Ok(Self { start, stop, n })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.stop } else { self.start + step * i as f64 })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Config(format!("grid `{s}` is not start:stop:n"));
        let mut parts = s.split(':');
        let (Some(a), Some(b), Some(n), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let start = a.trim().parse().map_err(|_| bad())?;
        let stop = b.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        GridSpec::new(start, stop, n)
    }
}

impl TryFrom<String> for GridSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        g.to_string()
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{:?}:{}", self.start, self.stop, self.n)
    }
}

fn one() -> f64 {
    1.0
}

/// Weight family plus the benefit-recipient weight, normalized later against
/// each schedule's distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant {
        #[serde(default = "one")]
        gstar: f64,
    },
    Power {
        nu: f64,
        #[serde(default = "one")]
        gstar: f64,
    },
    Step {
        threshold: f64,
        below: f64,
        above: f64,
        #[serde(default = "one")]
        gstar: f64,
    },
}

impl WeightSpec {
    pub fn family(&self) -> WeightFamily {
        match *self {
            WeightSpec::Constant { .. } => WeightFamily::Constant,
            WeightSpec::Power { nu, .. } => WeightFamily::Power { nu },
            WeightSpec::Step { threshold, below, above, .. } => WeightFamily::Step { threshold, below, above },
        }
    }

    pub fn gstar(&self) -> f64 {
        match *self {
            WeightSpec::Constant { gstar } | WeightSpec::Power { gstar, .. } | WeightSpec::Step { gstar, .. } => gstar,
        }
    }
}

fn default_floor() -> f64 {
    DEFAULT_FLOOR_MULTIPLIER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    pub distribution: String,
    pub weights: String,
    pub elasticity: String,
    #[serde(default = "default_floor")]
    pub floor_multiplier: f64,
    #[serde(default)]
    pub creation_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

/// Names of the schedules the policy engine pays prizes from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrizeRefs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub innovation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mineral: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monopoly: Option<String>,
}

/// The document as written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub valuations: BTreeMap<String, ValuationInput>,
    #[serde(default)]
    pub distributions: BTreeMap<String, DistributionKind>,
    #[serde(default)]
    pub weights: BTreeMap<String, WeightSpec>,
    #[serde(default)]
    pub elasticities: BTreeMap<String, ElasticityProfile>,
    #[serde(default)]
    pub schedules: BTreeMap<String, ScheduleSpec>,
    /// Agent lists keyed by the schedule they face.
    #[serde(default)]
    pub agents: BTreeMap<String, Vec<AgentProfile>>,
    #[serde(default)]
    pub assets: Vec<AssetRecord>,
    #[serde(default)]
    pub policy: PolicyConfig,
    #[serde(default)]
    pub prizes: PrizeRefs,
    #[serde(default)]
    pub costs: CostConventions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipient_weights: Option<BTreeMap<AssetCategory, f64>>,
}

impl ScenarioFile {
    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        toml::to_string(self).map_err(|e| ScenarioError::Syntax(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Dotted path to the offending field, e.g. `schedules.wage.weights`.
    pub locus: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.locus, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{0}")]
    Syntax(String),
    #[error("{} error(s):\n{}", .0.len(), .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSchedule {
    pub params: ScheduleParams,
    pub grid: Option<GridSpec>,
}

/// A validated scenario with every reference resolved.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub distributions: BTreeMap<String, DistributionModel>,
    pub schedules: BTreeMap<String, ResolvedSchedule>,
    pub policy: PolicyScenario,
    pub warnings: Vec<Diagnostic>,
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Read { path: path.display().to_string(), source })?;
    parse_scenario_str(&text)
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string().trim_end().to_string()))?;
    resolve(file)
}

pub fn reference_scenario() -> Scenario {
    parse_scenario_str(REFERENCE_SCENARIO).expect("bundled scenario is valid")
}

struct Collector(Vec<Diagnostic>);

impl Collector {
    fn push(&mut self, locus: impl Into<String>, message: impl fmt::Display) {
        self.0.push(Diagnostic { locus: locus.into(), message: message.to_string() });
    }

    fn check<T>(&mut self, locus: impl Into<String>, r: Result<T, Error>) -> Option<T> {
        r.map_err(|e| self.push(locus, e)).ok()
    }
}

/// Validates a parsed file and resolves its references.
pub fn resolve(file: ScenarioFile) -> Result<Scenario, ScenarioError> {
    let mut errs = Collector(Vec::new());
    let mut warnings = Vec::new();

    for (name, v) in &file.valuations {
        errs.check(format!("valuations.{name}"), v.validate());
    }

    let mut distributions = BTreeMap::new();
    for (name, kind) in &file.distributions {
        if let Some(m) = errs.check(format!("distributions.{name}"), DistributionModel::new(kind.clone())) {
            distributions.insert(name.clone(), m);
        }
    }
    for (name, e) in &file.elasticities {
        errs.check(format!("elasticities.{name}"), e.validate());
    }

    let mut schedules = BTreeMap::new();
    for (name, spec) in &file.schedules {
        let at = |field: &str| format!("schedules.{name}.{field}");
        let dist = distributions.get(&spec.distribution);
        if dist.is_none() && !file.distributions.contains_key(&spec.distribution) {
            errs.push(at("distribution"), format!("unknown distribution `{}`", spec.distribution));
        }
        let weights = file.weights.get(&spec.weights);
        if weights.is_none() {
            errs.push(at("weights"), format!("unknown weight profile `{}`", spec.weights));
        }
        let elasticity = file.elasticities.get(&spec.elasticity);
        if elasticity.is_none() {
            errs.push(at("elasticity"), format!("unknown elasticity profile `{}`", spec.elasticity));
        }
        let (Some(dist), Some(weights), Some(elasticity)) = (dist, weights, elasticity) else {
            continue;
        };
        let Some(profile) = errs.check(at("weights"), WelfareWeightProfile::normalized(weights.family(), weights.gstar(), dist)) else {
            continue;
        };
        let params = ScheduleParams::new(spec.kind, dist.clone(), profile, elasticity.clone())
            .and_then(|p| p.with_floor(spec.floor_multiplier, spec.creation_cost));
        let Some(params) = errs.check(format!("schedules.{name}"), params) else {
            continue;
        };
        if let Some(x) = regime_anomaly(&params) {
            warnings.push(Diagnostic {
                locus: at("weights"),
                message: format!("average weight above {x:.6e} exceeds 1; marginals there are flagged out of regime"),
            });
        }
        schedules.insert(name.clone(), ResolvedSchedule { params, grid: spec.grid });
    }

    for (sched, agents) in &file.agents {
        match file.schedules.get(sched) {
            None => errs.push(format!("agents.{sched}"), format!("unknown schedule `{sched}`")),
            Some(s) if !s.kind.is_prize() => errs.push(format!("agents.{sched}"), "agents need a prize schedule"),
            Some(_) => {}
        }
        for (i, a) in agents.iter().enumerate() {
            errs.check(format!("agents.{sched}[{i}]"), a.validate());
        }
    }

    errs.check("policy", file.policy.validate());
    errs.check("costs", file.costs.validate());

    let mut policy_schedules = PolicySchedules::default();
    let refs = [
        ("innovation", &file.prizes.innovation, ScheduleKind::InnovationPrize),
        ("mineral", &file.prizes.mineral, ScheduleKind::MineralPrize),
        ("monopoly", &file.prizes.monopoly, ScheduleKind::MonopolyPrize),
    ];
    for (field, name, kind) in refs {
        let Some(name) = name else { continue };
        let locus = format!("prizes.{field}");
        match (file.schedules.get(name), schedules.get(name)) {
            (None, _) => errs.push(locus, format!("unknown schedule `{name}`")),
            (Some(spec), _) if spec.kind != kind => {
                errs.push(locus, format!("schedule `{name}` is {}, expected {}", spec.kind.as_str(), kind.as_str()))
            }
            (Some(_), Some(r)) => {
                let slot = match kind {
                    ScheduleKind::InnovationPrize => &mut policy_schedules.innovation,
                    ScheduleKind::MineralPrize => &mut policy_schedules.mineral,
                    _ => &mut policy_schedules.monopoly,
                };
                *slot = Some(r.params.clone());
            }
            (Some(_), None) => {}
        }
    }

    let mut seen = BTreeMap::new();
    for (i, asset) in file.assets.iter().enumerate() {
        let at = format!("assets[{i}]");
        if let Some(prev) = seen.insert(asset.id.clone(), i) {
            errs.push(&at, format!("duplicate id `{}` (also assets[{prev}])", asset.id));
        }
        errs.check(&at, asset.validate());
        errs.check(format!("{at}.work"), asset.resolved_creation_cost(&file.costs));
        if let Some(kind) = asset.category.prize_kind() {
            if policy_schedules.for_kind(kind).is_none() && file.prizes_ref(kind).is_none() {
                errs.push(&at, format!("{} needs a [prizes] schedule for {}", asset.category.as_str(), kind.as_str()));
            }
        }
    }
    if let Some(w) = &file.recipient_weights {
        for (cat, v) in w {
            if !(*v >= 0.0 && v.is_finite()) {
                errs.push(format!("recipient_weights.{}", cat.as_str()), "weight must be finite and >= 0");
            }
        }
    }

    if !errs.0.is_empty() {
        return Err(ScenarioError::Invalid(errs.0));
    }
    let policy = PolicyScenario {
        assets: file.assets.clone(),
        config: file.policy.clone(),
        schedules: policy_schedules,
        conventions: file.costs,
        recipient_weights: file.recipient_weights.clone(),
    };
    Ok(Scenario { file, distributions, schedules, policy, warnings })
}

impl ScenarioFile {
    fn prizes_ref(&self, kind: ScheduleKind) -> Option<&String> {
        match kind {
            ScheduleKind::InnovationPrize => self.prizes.innovation.as_ref(),
            ScheduleKind::MineralPrize => self.prizes.mineral.as_ref(),
            ScheduleKind::MonopolyPrize => self.prizes.monopoly.as_ref(),
            ScheduleKind::WageTax => None,
        }
    }
}

/// First probe point where the average weight above exceeds one.
fn regime_anomaly(params: &ScheduleParams) -> Option<f64> {
    let dist = &params.distribution;
    let mut probes: Vec<f64> = (1..20).map(|i| dist.quantile(i as f64 / 20.0)).collect();
    if let WeightFamily::Step { threshold, .. } = params.weights.family() {
        probes.push(*threshold);
    }
    probes.sort_by(f64::total_cmp);
    probes
        .into_iter()
        .find(|&x| params.weights.avg_weight_above(dist, x).is_ok_and(|g| g > 1.0 + REGIME_TOL))
}

impl Scenario {
    pub fn schedule(&self, name: &str) -> Option<&ResolvedSchedule> {
        self.schedules.get(name)
    }

    /// Grid for a schedule: the override, the scenario's own grid, or 201
    /// points from 0 up to the one-in-a-million upper quantile.
    pub fn grid_for(&self, name: &str, grid_override: Option<GridSpec>) -> Option<Vec<f64>> {
        let s = self.schedules.get(name)?;
        let spec = grid_override.or(s.grid).unwrap_or_else(|| GridSpec {
            start: 0.0,
            stop: s.params.distribution.upper_quantile(1e-6),
            n: 201,
        });
        Some(spec.points())
    }
}
