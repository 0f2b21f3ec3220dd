//! Monte-Carlo sweeps over the estate-to-demand ratio.
//!
//! For every ratio and repetition a demand vector is drawn, the estate is
//! set to `ratio * sum(demands)`, every configured rule is applied and the
//! resulting satisfaction rates are summarized. Instance `(r, k)` (ratio
//! index `r`, repetition `k`) draws from stream `(r << 32) | k` of the
//! configured seed, and aggregation walks instances in index order, so the
//! output is bit-identical however the work is scheduled.
//!
//! Quartiles interpolate linearly between order statistics (the inclusive,
//! "type 7" definition). Box statistics report plain minimum and maximum.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fairness::{dfs, ps, squared_mean_index};
use crate::problem::{AllocationProblem, UserCase};
use crate::rng::{self, Stream};
use crate::rules::{Rule, SHAPLEY_MAX_USERS};

/// Law of individual demands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DemandDistribution {
    /// Uniform on `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// Weibull with density `(k/s) (x/s)^(k-1) exp(-(x/s)^k)`.
    Weibull { shape: f64, scale: f64 },
}

impl DemandDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi >= lo && hi > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "uniform bounds need 0 <= lo <= hi and hi > 0, got ({lo}, {hi})"
            )));
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && scale.is_finite() && shape > 0.0 && scale > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weibull shape and scale must be positive, got ({shape}, {scale})"
            )));
        }
        Ok(Self::Weibull { shape, scale })
    }

    /// One draw, by inversion of the CDF.
    pub fn sample(&self, stream: &mut Stream) -> f64 {
        let u = rng::unit(stream);
        match *self {
            Self::Uniform { lo, hi } => lo + (hi - lo) * u,
            Self::Weibull { shape, scale } => scale * (-(1.0 - u).ln()).powf(1.0 / shape),
        }
    }
}

impl FromStr for DemandDistribution {
    type Err = Error;

    /// `uniform:LO,HI` or `weibull:SHAPE,SCALE`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDistribution(format!("cannot parse `{s}`"));
        let (kind, params) = s.split_once(':').ok_or_else(bad)?;
        let values: Vec<f64> = params
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let [a, b] = values[..] else { return Err(bad()) };
        match kind.trim() {
            "uniform" => Self::uniform(a, b),
            "weibull" => Self::weibull(a, b),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for DemandDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            Self::Weibull { shape, scale } => write!(f, "weibull:{shape},{scale}"),
        }
    }
}

/// `n` independent positive demands; exact zeros are redrawn.
pub fn generate_demands(dist: &DemandDistribution, n: usize, stream: &mut Stream) -> Vec<f64> {
    (0..n)
        .map(|_| loop {
            let c = dist.sample(stream);
            if c > 0.0 {
                break c;
            }
        })
        .collect()
}

/// Problem whose estate is `ratio` times the total demand.
pub fn make_instance(demands: Vec<f64>, ratio: f64) -> Result<AllocationProblem> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidConfig(format!("ratio {ratio} is outside (0, 1)")));
    }
    let total: f64 = demands.iter().sum();
    AllocationProblem::new(demands, ratio * total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub distribution: DemandDistribution,
    pub users: usize,
    /// Estate as a fraction of total demand, each in `(0, 1)`.
    pub ratios: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub rules: Vec<Rule>,
    /// Use these demands for every instance instead of sampling.
    pub fixed_demands: Option<Vec<f64>>,
}

impl SweepConfig {
    /// `5%, 10%, ..., 95%`.
    pub fn standard_ratios() -> Vec<f64> {
        (1..=19).map(|k| k as f64 * 0.05).map(round_ratio).collect()
    }

    pub fn new(distribution: DemandDistribution, users: usize, seed: u64) -> Self {
        Self {
            distribution,
            users,
            ratios: Self::standard_ratios(),
            reps: 300,
            seed,
            rules: Rule::ALL.to_vec(),
            fixed_demands: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if let Some(fixed) = &self.fixed_demands {
            if fixed.len() != self.users {
                return bad(format!("{} fixed demands for {} users", fixed.len(), self.users));
            }
        }
        if self.users == 0 {
            return bad("at least one user is required".into());
        }
        if self.ratios.is_empty() {
            return bad("no ratios".into());
        }
        if let Some(r) = self.ratios.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return bad(format!("ratio {r} is outside (0, 1)"));
        }
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.rules.is_empty() {
            return bad("no rules".into());
        }
        if self.rules.contains(&Rule::Shapley) && self.users > SHAPLEY_MAX_USERS {
            return Err(Error::TooManyUsers {
                what: "shapley",
                limit: SHAPLEY_MAX_USERS,
                users: self.users,
            });
        }
        if self.reps as u64 > u32::MAX as u64 || self.ratios.len() as u64 > u32::MAX as u64 {
            return bad("too many instances".into());
        }
        Ok(())
    }
}

/// Rounds a grid value to 12 decimals so that `0.15` prints as `0.15`.
pub fn round_ratio(r: f64) -> f64 {
    (r * 1e12).round() / 1e12
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum IndexKind {
    #[serde(rename = "jain")]
    Jain,
    #[serde(rename = "player_fairness")]
    PlayerFairness,
}

impl IndexKind {
    pub fn id(self) -> &'static str {
        match self {
            IndexKind::Jain => "jain",
            IndexKind::PlayerFairness => "player_fairness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RateKind {
    #[serde(rename = "dfs")]
    Dfs,
    #[serde(rename = "ps")]
    Ps,
}

impl RateKind {
    pub fn id(self) -> &'static str {
        match self {
            RateKind::Dfs => "dfs",
            RateKind::Ps => "ps",
        }
    }
}

/// Mean and interquartile band of one fairness index for one
/// (ratio, rule) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub ratio: f64,
    pub rule: Rule,
    pub index: IndexKind,
    pub mean: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Share of users in each case at one ratio, pooled over instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRecord {
    pub ratio: f64,
    pub frac_gm: f64,
    pub frac_gg: f64,
    pub frac_mm: f64,
    pub frac_mg: f64,
}

impl CaseRecord {
    pub fn fraction(&self, case: UserCase) -> f64 {
        match case {
            UserCase::Gm => self.frac_gm,
            UserCase::Gg => self.frac_gg,
            UserCase::Mm => self.frac_mm,
            UserCase::Mg => self.frac_mg,
        }
    }

    /// Most frequent case (earliest in `Gm, Gg, Mm, Mg` order on ties).
    pub fn modal_case(&self) -> UserCase {
        UserCase::ALL
            .into_iter()
            .fold(UserCase::Gm, |best, c| if self.fraction(c) > self.fraction(best) { c } else { best })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl BoxStats {
    /// Summary of a non-empty sample.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Self {
            min: sorted[0],
            q1: quantile_sorted(&sorted, 0.25),
            median: quantile_sorted(&sorted, 0.5),
            q3: quantile_sorted(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
        })
    }
}

/// Pooled distribution of one satisfaction rate for a (ratio, rule) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxRecord {
    pub ratio: f64,
    pub rule: Rule,
    pub rate: RateKind,
    pub stats: BoxStats,
}

/// Mean componentwise L1 distance between a rule and the mood value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRecord {
    pub ratio: f64,
    pub rule: Rule,
    pub mean_l1_to_mood: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub instances: usize,
    pub indices: Vec<SweepRecord>,
    pub cases: Vec<CaseRecord>,
    pub boxes: Vec<BoxRecord>,
    /// Empty unless the mood value is among the configured rules.
    pub distances: Vec<DistanceRecord>,
}

/// Linear interpolation between order statistics of a sorted sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

struct RuleOutcome {
    amounts: Vec<f64>,
    dfs: Vec<f64>,
    ps: Vec<f64>,
    jain: f64,
    player_fairness: f64,
}

struct InstanceOutcome {
    cases: Vec<UserCase>,
    rules: Vec<RuleOutcome>,
}

fn evaluate_instance(config: &SweepConfig, ratio_index: usize, rep: usize) -> Result<InstanceOutcome> {
    let demands = match &config.fixed_demands {
        Some(fixed) => fixed.clone(),
        None => {
            let mut stream = rng::stream(config.seed, ((ratio_index as u64) << 32) | rep as u64);
            generate_demands(&config.distribution, config.users, &mut stream)
        }
    };
    let problem = make_instance(demands, config.ratios[ratio_index])?;
    let rules = config
        .rules
        .iter()
        .map(|rule| {
            let allocation = rule.apply(&problem)?;
            let dfs = dfs(&problem, &allocation)?;
            let ps = ps(&problem, &allocation)?;
            let jain = squared_mean_index(&dfs).ok_or(Error::UndefinedIndex("Jain's index"))?;
            let player_fairness =
                squared_mean_index(&ps).ok_or(Error::UndefinedIndex("player fairness index"))?;
            Ok(RuleOutcome { amounts: allocation.amounts, dfs, ps, jain, player_fairness })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InstanceOutcome { cases: problem.classify_all(), rules })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Runs every (ratio, repetition) instance and aggregates the results.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let reps = config.reps;
    let outcomes: Vec<InstanceOutcome> = (0..config.ratios.len() * reps)
        .into_par_iter()
        .map(|k| evaluate_instance(config, k / reps, k % reps))
        .collect::<Result<_>>()?;

    let mood_slot = config.rules.iter().position(|r| *r == Rule::Mood);
    let mut indices = Vec::new();
    let mut cases = Vec::new();
    let mut boxes = Vec::new();
    let mut distances = Vec::new();

    for (r, &ratio) in config.ratios.iter().enumerate() {
        let block = &outcomes[r * reps..(r + 1) * reps];

        let mut counts = [0usize; 4];
        for outcome in block {
            for case in &outcome.cases {
                counts[*case as usize] += 1;
            }
        }
        let pooled = (reps * config.users) as f64;
        cases.push(CaseRecord {
            ratio,
            frac_gm: counts[UserCase::Gm as usize] as f64 / pooled,
            frac_gg: counts[UserCase::Gg as usize] as f64 / pooled,
            frac_mm: counts[UserCase::Mm as usize] as f64 / pooled,
            frac_mg: counts[UserCase::Mg as usize] as f64 / pooled,
        });

        for (slot, &rule) in config.rules.iter().enumerate() {
            for kind in [IndexKind::Jain, IndexKind::PlayerFairness] {
                let mut values: Vec<f64> = block
                    .iter()
                    .map(|o| match kind {
                        IndexKind::Jain => o.rules[slot].jain,
                        IndexKind::PlayerFairness => o.rules[slot].player_fairness,
                    })
                    .collect();
                let mean = mean(&values);
                values.sort_by(f64::total_cmp);
                indices.push(SweepRecord {
                    ratio,
                    rule,
                    index: kind,
                    mean,
                    q1: quantile_sorted(&values, 0.25),
                    q3: quantile_sorted(&values, 0.75),
                });
            }
            for rate in [RateKind::Dfs, RateKind::Ps] {
                let values: Vec<f64> = block
                    .iter()
                    .flat_map(|o| match rate {
                        RateKind::Dfs => o.rules[slot].dfs.iter().copied(),
                        RateKind::Ps => o.rules[slot].ps.iter().copied(),
                    })
                    .collect();
                if let Some(stats) = BoxStats::from_values(&values) {
                    boxes.push(BoxRecord { ratio, rule, rate, stats });
                }
            }
            if let Some(m) = mood_slot {
                let l1: Vec<f64> = block
                    .iter()
                    .map(|o| {
                        o.rules[slot]
                            .amounts
                            .iter()
                            .zip(&o.rules[m].amounts)
                            .map(|(a, b)| (a - b).abs())
                            .sum()
                    })
                    .collect();
                distances.push(DistanceRecord { ratio, rule, mean_l1_to_mood: mean(&l1) });
            }
        }
    }

    indices.sort_by(|a, b| {
        a.ratio
            .total_cmp(&b.ratio)
            .then_with(|| a.rule.id().cmp(b.rule.id()))
            .then_with(|| a.index.id().cmp(b.index.id()))
    });
    cases.sort_by(|a, b| a.ratio.total_cmp(&b.ratio));
    boxes.sort_by(|a, b| {
        a.ratio
            .total_cmp(&b.ratio)
            .then_with(|| a.rule.id().cmp(b.rule.id()))
            .then_with(|| a.rate.id().cmp(b.rate.id()))
    });
    distances.sort_by(|a, b| a.ratio.total_cmp(&b.ratio).then_with(|| a.rule.id().cmp(b.rule.id())));

    Ok(SweepOutput { instances: outcomes.len(), indices, cases, boxes, distances })
}

/// Satisfaction-rate distributions at 5% and 95% of total demand for each
/// user count in `users`, otherwise following `base`.
pub fn satisfaction_boxstats(base: &SweepConfig, users: &[usize]) -> Result<Vec<(usize, SweepOutput)>> {
    users
        .iter()
        .map(|&n| {
            let config = SweepConfig { users: n, ratios: vec![0.05, 0.95], ..base.clone() };
            run_sweep(&config).map(|out| (n, out))
        })
        .collect()
}
