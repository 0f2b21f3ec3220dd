//! Division rules for bankruptcy problems.
//!
//! Every rule is a deterministic function of the problem. The closed forms
//! (proportional, CEA/CEL families, Talmud, mood value) run in
//! `O(n log n)` or better; only the Shapley value enumerates coalitions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{full_mask, scaled_tolerance, AllocationProblem, TOLERANCE};

/// Largest game the exact Shapley enumeration accepts.
pub const SHAPLEY_MAX_USERS: usize = 20;

/// Identifier of an allocation rule. The string forms are stable and used in
/// every output file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "prop")]
    Proportional,
    /// Weighted proportional with unit weights when run by identifier.
    #[serde(rename = "wprop")]
    WeightedProportional,
    #[serde(rename = "mmf")]
    Mmf,
    #[serde(rename = "cel")]
    Cel,
    #[serde(rename = "shapley")]
    Shapley,
    #[serde(rename = "nucleolus")]
    Nucleolus,
    #[serde(rename = "mood")]
    Mood,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::Proportional,
        Rule::WeightedProportional,
        Rule::Mmf,
        Rule::Cel,
        Rule::Shapley,
        Rule::Nucleolus,
        Rule::Mood,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::Proportional => "prop",
            Rule::WeightedProportional => "wprop",
            Rule::Mmf => "mmf",
            Rule::Cel => "cel",
            Rule::Shapley => "shapley",
            Rule::Nucleolus => "nucleolus",
            Rule::Mood => "mood",
        }
    }

    /// Runs the rule. `wprop` uses unit weights here; call
    /// [`weighted_proportional`] directly for other weights.
    pub fn apply(self, problem: &AllocationProblem) -> Result<Allocation> {
        match self {
            Rule::Proportional => Ok(proportional(problem)),
            Rule::WeightedProportional => {
                weighted_proportional(problem, &WeightVector::uniform(problem.users()))
            }
            Rule::Mmf => Ok(mmf(problem)),
            Rule::Cel => Ok(cel(problem)),
            Rule::Shapley => shapley(problem),
            Rule::Nucleolus => Ok(nucleolus(problem)),
            Rule::Mood => Ok(mood_value(problem)),
        }
    }

    /// Parses a comma separated list of identifiers; `all` selects every rule.
    pub fn parse_list(list: &str) -> Result<Vec<Rule>> {
        let mut rules = Vec::new();
        for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if token == "all" {
                for rule in Rule::ALL {
                    if !rules.contains(&rule) {
                        rules.push(rule);
                    }
                }
                continue;
            }
            let rule: Rule = token.parse()?;
            if !rules.contains(&rule) {
                rules.push(rule);
            }
        }
        if rules.is_empty() {
            return Err(Error::UnknownRule(list.to_string()));
        }
        Ok(rules)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.id() == s)
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

/// A division of the estate, tagged with the rule that produced it (if any).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    pub amounts: Vec<f64>,
    pub rule: Option<Rule>,
}

impl Allocation {
    pub fn new(amounts: Vec<f64>, rule: Option<Rule>) -> Self {
        Self { amounts, rule }
    }

    /// Wraps externally supplied amounts after checking them against `problem`.
    pub fn checked(problem: &AllocationProblem, amounts: Vec<f64>) -> Result<Self> {
        let allocation = Self::new(amounts, None);
        allocation.validate(problem)?;
        Ok(allocation)
    }

    pub fn users(&self) -> usize {
        self.amounts.len()
    }

    pub fn total(&self) -> f64 {
        self.amounts.iter().sum()
    }

    /// Non-negativity, demand boundedness and efficiency.
    pub fn validate(&self, problem: &AllocationProblem) -> Result<()> {
        problem.check_len(self.users())?;
        for (i, (&x, &c)) in self.amounts.iter().zip(problem.demands()).enumerate() {
            if !x.is_finite() || x < -TOLERANCE {
                return Err(Error::InvalidAllocation(format!("user {i} receives {x} < 0")));
            }
            if x > c + TOLERANCE {
                return Err(Error::InvalidAllocation(format!(
                    "user {i} receives {x}, above its demand {c}"
                )));
            }
        }
        let total = self.total();
        let estate = problem.estate();
        if (total - estate).abs() > scaled_tolerance(estate) {
            return Err(Error::InvalidAllocation(format!(
                "amounts sum to {total}, estate is {estate}"
            )));
        }
        Ok(())
    }

    /// Componentwise L1 distance.
    pub fn l1_distance(&self, other: &Allocation) -> f64 {
        self.amounts
            .iter()
            .zip(&other.amounts)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// Strictly positive per-user weights for the weighted proportional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidWeight { index, value });
        }
        Ok(Self(weights))
    }

    pub fn uniform(users: usize) -> Self {
        Self(vec![1.0; users])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `x_i = E c_i / sum(c)`.
pub fn proportional(problem: &AllocationProblem) -> Allocation {
    let estate = problem.estate();
    let total = problem.total_demand();
    let amounts = problem.demands().iter().map(|c| estate * c / total).collect();
    Allocation::new(amounts, Some(Rule::Proportional))
}

/// Maximizer of `sum w_i log x_i` subject to `0 <= x_i <= c_i`, `sum x = E`.
///
/// The KKT conditions give `x_i = min(c_i, w_i t)` for a common level `t`.
/// Users are saturated in increasing order of `c_i / w_i` until the level
/// that spends the remaining estate no longer reaches the next cap.
pub fn weighted_proportional(
    problem: &AllocationProblem,
    weights: &WeightVector,
) -> Result<Allocation> {
    problem.check_len(weights.as_slice().len())?;
    let amounts = water_fill(problem.demands(), weights.as_slice(), problem.estate());
    Ok(Allocation::new(amounts, Some(Rule::WeightedProportional)))
}

fn water_fill(caps: &[f64], weights: &[f64], amount: f64) -> Vec<f64> {
    let n = caps.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| (caps[a] / weights[a]).total_cmp(&(caps[b] / weights[b])));
    let mut weight_left = vec![0.0; n + 1];
    for k in (0..n).rev() {
        weight_left[k] = weight_left[k + 1] + weights[order[k]];
    }

    let mut x = vec![0.0; n];
    let mut remaining = amount;
    for (k, &i) in order.iter().enumerate() {
        let level = remaining.max(0.0) / weight_left[k];
        if caps[i] <= weights[i] * level {
            x[i] = caps[i];
            remaining -= caps[i];
        } else {
            for &j in &order[k..] {
                x[j] = weights[j] * level;
            }
            break;
        }
    }
    x
}

/// Constrained equal awards: `x_i = min(a_i, t)` with `sum x = amount`.
pub(crate) fn constrained_equal_awards(claims: &[f64], amount: f64) -> Vec<f64> {
    let n = claims.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| claims[a].total_cmp(&claims[b]));

    let mut x = vec![0.0; n];
    let mut remaining = amount.max(0.0);
    for (k, &i) in order.iter().enumerate() {
        let share = remaining / (n - k) as f64;
        if claims[i] <= share {
            x[i] = claims[i];
            remaining = (remaining - claims[i]).max(0.0);
        } else {
            for &j in &order[k..] {
                x[j] = share;
            }
            break;
        }
    }
    x
}

/// Max-min fair allocation by progressive filling on sorted demands.
pub fn mmf(problem: &AllocationProblem) -> Allocation {
    let amounts = constrained_equal_awards(problem.demands(), problem.estate());
    Allocation::new(amounts, Some(Rule::Mmf))
}

/// Constrained equal losses: `x_i = max(c_i - t, 0)`.
///
/// Losses `c_i - x_i = min(c_i, t)` are themselves a CEA division of the
/// total shortfall, which is how the level is located.
pub fn cel(problem: &AllocationProblem) -> Allocation {
    let demands = problem.demands();
    let shortfall = (problem.total_demand() - problem.estate()).max(0.0);
    let losses = constrained_equal_awards(demands, shortfall);
    let amounts = demands
        .iter()
        .zip(losses)
        .map(|(c, l)| (c - l).max(0.0))
        .collect();
    Allocation::new(amounts, Some(Rule::Cel))
}

/// Exact Shapley value by subset enumeration (`n <= 20`).
pub fn shapley(problem: &AllocationProblem) -> Result<Allocation> {
    let n = problem.users();
    if n > SHAPLEY_MAX_USERS {
        return Err(Error::TooManyUsers { what: "shapley", limit: SHAPLEY_MAX_USERS, users: n });
    }
    let demands = problem.demands();
    let estate = problem.estate();
    let full = full_mask(n);
    let size = 1usize << n;

    let mut claimed = vec![0.0f64; size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        claimed[mask] = claimed[mask & (mask - 1)] + demands[low];
    }
    let value: Vec<f64> = (0..size)
        .map(|mask| {
            if mask == 0 {
                0.0
            } else if mask as u64 == full {
                estate
            } else {
                (estate - claimed[full as usize ^ mask]).max(0.0)
            }
        })
        .collect();

    // weight[s] = s! (n - 1 - s)! / n! for a coalition of s others.
    let mut weight = vec![0.0f64; n];
    let mut binom = 1.0f64;
    for (s, w) in weight.iter_mut().enumerate() {
        *w = 1.0 / (n as f64 * binom);
        binom = binom * (n - 1 - s) as f64 / (s + 1) as f64;
    }

    let mut phi = vec![0.0f64; n];
    for mask in 0..size {
        let w = weight.get(mask.count_ones() as usize).copied().unwrap_or(0.0);
        for (i, slot) in phi.iter_mut().enumerate() {
            let bit = 1usize << i;
            if mask & bit == 0 {
                *slot += w * (value[mask | bit] - value[mask]);
            }
        }
    }
    Ok(Allocation::new(phi, Some(Rule::Shapley)))
}

/// Nucleolus of the bankruptcy game through its Talmud closed form.
///
/// Below half the total demand the estate is divided by CEA on half-claims;
/// above it, losses are divided that way instead.
pub fn nucleolus(problem: &AllocationProblem) -> Allocation {
    let demands = problem.demands();
    let half: Vec<f64> = demands.iter().map(|c| c / 2.0).collect();
    let total = problem.total_demand();
    let estate = problem.estate();
    let amounts = if estate <= total / 2.0 {
        constrained_equal_awards(&half, estate)
    } else {
        let losses = constrained_equal_awards(&half, total - estate);
        demands.iter().zip(losses).map(|(c, l)| (c - l).max(0.0)).collect()
    };
    Allocation::new(amounts, Some(Rule::Nucleolus))
}

/// Mood value: `x_i = min_i + m (max_i - min_i)`, every user at PS rate `m`.
pub fn mood_value(problem: &AllocationProblem) -> Allocation {
    if problem.is_degenerate() {
        return Allocation::new(problem.demands().to_vec(), Some(Rule::Mood));
    }
    let rights = problem.rights_profile();
    let m = rights.mood;
    let amounts = rights
        .min_rights
        .iter()
        .zip(&rights.max_rights)
        .map(|(lo, hi)| lo + m * (hi - lo))
        .collect();
    Allocation::new(amounts, Some(Rule::Mood))
}

/// Intermediate results of the reduced-problem route to the mood value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoodSteps {
    /// Step 1: every user's minimal right.
    pub min_rights: Vec<f64>,
    /// Step 2: estate left after paying minimal rights.
    pub reduced_estate: f64,
    /// Step 2: width of each user's feasible range, `max_i - min_i`.
    pub reduced_demands: Vec<f64>,
    /// Step 3: weighted proportional division of the reduced problem,
    /// weights equal to the reduced demands.
    pub reduced_allocation: Vec<f64>,
    /// Step 4: minimal rights plus the step 3 shares.
    pub allocation: Allocation,
}

/// Mood value computed as minimal rights plus a log-utility division of the
/// reduced problem `(max - min, E - sum(min))`.
pub fn mood_value_steps(problem: &AllocationProblem) -> MoodSteps {
    let rights = problem.rights_profile();
    if problem.is_degenerate() {
        let n = problem.users();
        return MoodSteps {
            min_rights: rights.min_rights,
            reduced_estate: 0.0,
            reduced_demands: vec![0.0; n],
            reduced_allocation: vec![0.0; n],
            allocation: Allocation::new(problem.demands().to_vec(), Some(Rule::Mood)),
        };
    }
    let reduced_estate = (problem.estate() - rights.min_rights.iter().sum::<f64>()).max(0.0);
    let reduced_demands: Vec<f64> = rights
        .max_rights
        .iter()
        .zip(&rights.min_rights)
        .map(|(hi, lo)| (hi - lo).max(0.0))
        .collect();

    // Users with an empty range carry zero weight: log terms vanish and
    // their cap pins them at 0.
    let active: Vec<usize> = (0..reduced_demands.len())
        .filter(|&i| reduced_demands[i] > 0.0)
        .collect();
    let mut reduced_allocation = vec![0.0; reduced_demands.len()];
    if !active.is_empty() {
        let caps: Vec<f64> = active.iter().map(|&i| reduced_demands[i]).collect();
        let shares = water_fill(&caps, &caps, reduced_estate);
        for (&i, share) in active.iter().zip(shares) {
            reduced_allocation[i] = share;
        }
    }
    let amounts = rights
        .min_rights
        .iter()
        .zip(&reduced_allocation)
        .map(|(lo, x)| lo + x)
        .collect();
    MoodSteps {
        min_rights: rights.min_rights,
        reduced_estate,
        reduced_demands,
        reduced_allocation,
        allocation: Allocation::new(amounts, Some(Rule::Mood)),
    }
}

pub fn mood_value_4step(problem: &AllocationProblem) -> Allocation {
    mood_value_steps(problem).allocation
}
