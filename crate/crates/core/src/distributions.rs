//! Parametric distributions of income and created-asset values, with the
//! local Pareto parameter `alpha(x) = x f(x) / (1 - F(x))` and the average
//! welfare weight above a point.
//!
//! Integrals run on the truncated support `[support_floor, upper_cutoff]`,
//! where each end cuts off at most [`TAIL_CUTOFF`] of the mass. Queries in
//! the upper tail beyond the cutoff fail with [`Error::TailTruncation`].

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_piecewise, DEFAULT_ABS_TOL};

/// Probability mass left outside the truncated support at either end.
pub const TAIL_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionKind {
    Pareto { scale: f64, shape: f64 },
    #[serde(rename = "lognormal")]
    LogNormal { mu: f64, sigma: f64 },
    /// Histogram: `masses[i]` spread uniformly on `[edges[i], edges[i + 1])`.
    Empirical { edges: Vec<f64>, masses: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionModel {
    kind: DistributionKind,
    /// Normalized bin masses and suffix sums (empirical only).
    bins: Vec<f64>,
    tail_mass: Vec<f64>,
    support_floor: f64,
    upper_cutoff: f64,
}

impl DistributionModel {
    pub fn new(kind: DistributionKind) -> Result<Self> {
        let mut model = Self { kind, bins: Vec::new(), tail_mass: Vec::new(), support_floor: 0.0, upper_cutoff: 0.0 };
        match &model.kind {
            DistributionKind::Pareto { scale, shape } => {
                if !(*scale > 0.0 && scale.is_finite()) || !(*shape > 0.0 && shape.is_finite()) {
                    return Err(Error::domain("pareto needs scale > 0 and shape > 0"));
                }
            }
            DistributionKind::LogNormal { mu, sigma } => {
                if !mu.is_finite() || !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::domain("lognormal needs finite mu and sigma > 0"));
                }
            }
            DistributionKind::Empirical { edges, masses } => {
                if edges.len() < 2 || masses.len() + 1 != edges.len() {
                    return Err(Error::domain("empirical needs n + 1 edges for n masses (n >= 1)"));
                }
                if edges[0] < 0.0 || edges.iter().any(|e| !e.is_finite()) {
                    return Err(Error::domain("empirical edges must be finite and nonnegative"));
                }
                if edges.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::domain("empirical edges must be strictly increasing"));
                }
                if masses.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
                    return Err(Error::domain("empirical masses must be finite and nonnegative"));
                }
                let total: f64 = masses.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::domain("empirical masses must not all be zero"));
                }
                model.bins = masses.iter().map(|m| m / total).collect();
                let mut tail = vec![0.0; model.bins.len() + 1];
                for i in (0..model.bins.len()).rev() {
                    tail[i] = tail[i + 1] + model.bins[i];
                }
                model.tail_mass = tail;
            }
        }
        model.support_floor = model.lower_quantile(TAIL_CUTOFF);
        model.upper_cutoff = model.upper_quantile(TAIL_CUTOFF);
        Ok(model)
    }

    pub fn pareto(scale: f64, shape: f64) -> Result<Self> {
        Self::new(DistributionKind::Pareto { scale, shape })
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(DistributionKind::LogNormal { mu, sigma })
    }

    pub fn empirical(edges: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        Self::new(DistributionKind::Empirical { edges, masses })
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    /// Lowest point of the truncated support.
    pub fn support_floor(&self) -> f64 {
        self.support_floor
    }

    /// Point beyond which the upper tail holds less than [`TAIL_CUTOFF`].
    pub fn upper_cutoff(&self) -> f64 {
        self.upper_cutoff
    }

    /// Points where the density has a kink or jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            DistributionKind::Pareto { scale, .. } => vec![*scale],
            DistributionKind::LogNormal { .. } => Vec::new(),
            DistributionKind::Empirical { edges, .. } => edges.clone(),
        }
    }

    fn empirical_bin(&self, x: f64) -> Option<usize> {
        let DistributionKind::Empirical { edges, .. } = &self.kind else { return None };
        if x < edges[0] || x >= edges[edges.len() - 1] {
            return None;
        }
        Some(edges.partition_point(|&e| e <= x) - 1)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    /// `1 - cdf(x)`, computed directly to keep precision in the upper tail.
    pub fn survival(&self, x: f64) -> f64 {
        match &self.kind {
            DistributionKind::Pareto { scale, shape } => {
                if x <= *scale {
                    1.0
                } else {
                    (scale / x).powf(*shape)
                }
            }
            DistributionKind::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    let z = (x.ln() - mu) / sigma;
                    0.5 * erfc(z / std::f64::consts::SQRT_2)
                }
            }
            DistributionKind::Empirical { edges, .. } => {
                if x < edges[0] {
                    return 1.0;
                }
                match self.empirical_bin(x) {
                    None => 0.0,
                    Some(i) => {
                        let frac = (x - edges[i]) / (edges[i + 1] - edges[i]);
                        (1.0 - frac) * self.bins[i] + self.tail_mass[i + 1]
                    }
                }
            }
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match &self.kind {
            DistributionKind::Pareto { scale, shape } => {
                if x < *scale {
                    0.0
                } else {
                    shape * scale.powf(*shape) / x.powf(shape + 1.0)
                }
            }
            DistributionKind::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let z = (x.ln() - mu) / sigma;
                    (-0.5 * z * z).exp() / (x * sigma * (2.0 * std::f64::consts::PI).sqrt())
                }
            }
            DistributionKind::Empirical { edges, .. } => match self.empirical_bin(x) {
                None => 0.0,
                Some(i) => self.bins[i] / (edges[i + 1] - edges[i]),
            },
        }
    }

    /// Smallest `x` with `survival(x) <= tail`.
    pub fn upper_quantile(&self, tail: f64) -> f64 {
        let tail = tail.clamp(0.0, 1.0);
        match &self.kind {
            DistributionKind::Pareto { scale, shape } => scale * tail.powf(-1.0 / shape),
            DistributionKind::LogNormal { mu, sigma } => {
                let z = std::f64::consts::SQRT_2 * erfc_inv(2.0 * tail);
                (mu + sigma * z).exp()
            }
            DistributionKind::Empirical { edges, .. } => {
                if tail >= 1.0 {
                    return edges[0];
                }
                // last bin i whose upper part still holds `tail`
                let n = self.bins.len();
                for i in (0..n).rev() {
                    if self.tail_mass[i] >= tail {
                        if self.bins[i] == 0.0 {
                            return edges[i + 1];
                        }
                        let frac = 1.0 - (tail - self.tail_mass[i + 1]) / self.bins[i];
                        return edges[i] + frac.clamp(0.0, 1.0) * (edges[i + 1] - edges[i]);
                    }
                }
                edges[0]
            }
        }
    }

    /// Largest `x` with `cdf(x) <= p`.
    pub fn lower_quantile(&self, p: f64) -> f64 {
        match &self.kind {
            DistributionKind::Pareto { scale, .. } => *scale,
            DistributionKind::LogNormal { mu, sigma } => {
                let z = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p.clamp(0.0, 1.0));
                (mu + sigma * z).exp()
            }
            DistributionKind::Empirical { edges, .. } => {
                // the first bin holding mass marks the floor
                let first = self.bins.iter().position(|&m| m > 0.0).unwrap_or(0);
                edges[first]
            }
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.upper_quantile(1.0 - p)
    }

    fn check_tail(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("value {x} must be nonnegative")));
        }
        let s = self.survival(x);
        if s < TAIL_CUTOFF {
            return Err(Error::TailTruncation { x, survival: s });
        }
        Ok(s)
    }

    /// `x f(x) / (1 - F(x))`.
    pub fn local_pareto_parameter(&self, x: f64) -> Result<f64> {
        let s = self.check_tail(x)?;
        Ok(x * self.density(x) / s)
    }

    /// Integral of `g(x) f(x)` over `[lo, hi]` inside the truncated support.
    fn weighted_mass<G: Fn(f64) -> f64>(&self, g: G, lo: f64, hi: f64, extra_breaks: &[f64], tol: f64) -> Result<f64> {
        let lo = lo.max(self.support_floor);
        let hi = hi.min(self.upper_cutoff);
        if hi <= lo {
            return Ok(0.0);
        }
        let mut breaks = self.breakpoints();
        breaks.extend_from_slice(extra_breaks);
        integrate_piecewise(|x| g(x) * self.density(x), lo, hi, &breaks, tol)
    }

    /// Probability mass between the support floor and the upper cutoff.
    pub fn support_mass(&self) -> f64 {
        self.survival(self.support_floor) - self.survival(self.upper_cutoff)
    }

    /// Probability mass on the truncated support, by quadrature of the density.
    pub fn truncated_mass(&self) -> Result<f64> {
        self.weighted_mass(|_| 1.0, self.support_floor, self.upper_cutoff, &[], 1e-10)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightFamily {
    Constant,
    /// `x^(-nu)`, `nu >= 0`.
    Power { nu: f64 },
    /// `below` for `x < threshold`, `above` otherwise.
    Step { threshold: f64, below: f64, above: f64 },
}

impl WeightFamily {
    fn raw(&self, x: f64) -> f64 {
        match self {
            WeightFamily::Constant => 1.0,
            WeightFamily::Power { nu } => x.powf(-nu),
            WeightFamily::Step { threshold, below, above } => {
                if x < *threshold {
                    *below
                } else {
                    *above
                }
            }
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match self {
            WeightFamily::Step { threshold, .. } => vec![*threshold],
            _ => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            WeightFamily::Constant => Ok(()),
            WeightFamily::Power { nu } if *nu >= 0.0 && nu.is_finite() => Ok(()),
            WeightFamily::Power { .. } => Err(Error::domain("power weight exponent must be >= 0")),
            WeightFamily::Step { threshold, below, above } => {
                if !threshold.is_finite() || !(*below >= 0.0) || !(*above >= 0.0) {
                    Err(Error::domain("step weights need a finite threshold and nonnegative levels"))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Social welfare weights normalized so the population mean is 1 under a
/// given distribution, plus the benefit-recipient weight `G*`.
#[derive(Debug, Clone, PartialEq)]
pub struct WelfareWeightProfile {
    family: WeightFamily,
    scale: f64,
    benefit_weight: f64,
}

impl WelfareWeightProfile {
    pub fn normalized(family: WeightFamily, benefit_weight: f64, model: &DistributionModel) -> Result<Self> {
        family.validate()?;
        if !(benefit_weight >= 0.0 && benefit_weight.is_finite()) {
            return Err(Error::domain("benefit weight G* must be finite and >= 0"));
        }
        let scale = match family {
            WeightFamily::Constant => 1.0,
            _ => {
                if matches!(family, WeightFamily::Power { nu } if nu > 0.0) && model.support_floor() <= 0.0 {
                    return Err(Error::domain("power weights need a distribution with a positive support floor"));
                }
                let total = model.weighted_mass(|x| family.raw(x), 0.0, f64::INFINITY, &family.breaks(), 1e-10)?;
                if !(total > 0.0) {
                    return Err(Error::domain("weights carry no mass under the distribution"));
                }
                // mean 1 over the truncated support
                model.support_mass() / total
            }
        };
        Ok(Self { family, scale, benefit_weight })
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    /// `G*`.
    pub fn benefit_weight(&self) -> f64 {
        self.benefit_weight
    }

    pub fn weight(&self, x: f64) -> f64 {
        self.scale * self.family.raw(x)
    }

    /// Bound on `|g - 1|` over `[lo, hi]`.
    fn spread_bound(&self, lo: f64, hi: f64) -> f64 {
        let levels = match self.family {
            WeightFamily::Step { below, above, .. } => vec![self.scale * below, self.scale * above],
            _ => vec![self.weight(lo), self.weight(hi)],
        };
        levels.into_iter().map(|g| (g - 1.0).abs()).fold(1.0, f64::max)
    }

    /// Population mean of the normalized weight, by quadrature.
    pub fn population_mean(&self, model: &DistributionModel) -> Result<f64> {
        model.weighted_mass(|x| self.weight(x), 0.0, f64::INFINITY, &self.family.breaks(), 1e-10)
    }

    /// Person-weighted mean of `g(X)` among `X > x`.
    ///
    /// At or below the support floor the condition selects the whole
    /// population, whose mean weight is 1 by normalization.
    pub fn avg_weight_above(&self, model: &DistributionModel, x: f64) -> Result<f64> {
        let survival = model.check_tail(x)?;
        if matches!(self.family, WeightFamily::Constant) || x <= model.support_floor() {
            return Ok(1.0);
        }
        let mass = survival - model.survival(model.upper_cutoff());
        if !(mass > 0.0) {
            return Err(Error::TailTruncation { x, survival });
        }
        if model.cdf(x) < 0.5 {
            // Below the median, 1 - G is the excess weight of the people
            // under x, which avoids cancelling two numbers close to 1.
            let below = model.survival(model.support_floor()) - survival;
            let spread = self.spread_bound(model.support_floor(), x);
            let tol = (1e-2 * DEFAULT_ABS_TOL * spread * below).max(1e-14 * mass);
            let excess = model.weighted_mass(|v| self.weight(v) - 1.0, 0.0, x, &self.family.breaks(), tol)?;
            return Ok((1.0 - excess / mass).max(0.0));
        }
        let tol = DEFAULT_ABS_TOL * mass;
        let num = model.weighted_mass(|v| self.weight(v), x, f64::INFINITY, &self.family.breaks(), tol)?;
        Ok((num / mass).max(0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElasticityProfile {
    Constant { value: f64 },
    /// `values[i]` applies from `breakpoints[i - 1]` (inclusive) up to
    /// `breakpoints[i]`; needs one more value than breakpoints.
    Piecewise { breakpoints: Vec<f64>, values: Vec<f64> },
}

impl ElasticityProfile {
    pub fn constant(value: f64) -> Self {
        ElasticityProfile::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ElasticityProfile::Constant { value } if *value >= 0.0 && value.is_finite() => Ok(()),
            ElasticityProfile::Constant { .. } => Err(Error::domain("elasticity must be finite and >= 0")),
            ElasticityProfile::Piecewise { breakpoints, values } => {
                if values.len() != breakpoints.len() + 1 {
                    return Err(Error::domain("piecewise elasticity needs one more value than breakpoints"));
                }
                if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::domain("elasticity breakpoints must be strictly increasing"));
                }
                if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(Error::domain("elasticity must be finite and >= 0"));
                }
                Ok(())
            }
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        match self {
            ElasticityProfile::Constant { value } => *value,
            ElasticityProfile::Piecewise { breakpoints, values } => values[breakpoints.partition_point(|&b| b <= x)],
        }
    }
}
