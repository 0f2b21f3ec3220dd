//! Satisfaction rates and fairness indices.
//!
//! Two per-user rates are provided. The demand fraction satisfaction (DFS)
//! rate is `x_i / c_i`. The player satisfaction (PS) rate places `x_i`
//! inside the user's core range `[v({i}), v(N) - v(N \ {i})]`. Both feed
//! the same squared-mean over mean-square index, giving Jain's index and
//! the player fairness index respectively.
//!
//! PS is not clamped: allocations outside the core can produce rates below
//! 0 or above 1.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{scaled_tolerance, AllocationProblem, Coalition, UserCase};
use crate::rules::Allocation;

/// DFS and PS vectors plus both indices and the singleton propensities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatisfactionReport {
    pub cases: Vec<UserCase>,
    pub dfs: Vec<f64>,
    pub ps: Vec<f64>,
    pub jain: f64,
    pub player_fairness: f64,
    /// `d(x, {i})`; `f64::INFINITY` when user `i` sits at its minimal right.
    pub propensity: Vec<f64>,
}

impl SatisfactionReport {
    pub fn new(problem: &AllocationProblem, allocation: &Allocation) -> Result<Self> {
        let dfs = dfs(problem, allocation)?;
        let ps = ps(problem, allocation)?;
        let jain = squared_mean_index(&dfs).ok_or(Error::UndefinedIndex("Jain's index"))?;
        let player_fairness =
            squared_mean_index(&ps).ok_or(Error::UndefinedIndex("player fairness index"))?;
        let propensity = singleton_propensities(problem, allocation)?;
        Ok(Self { cases: problem.classify_all(), dfs, ps, jain, player_fairness, propensity })
    }
}

/// Demand fraction satisfaction `x_i / c_i`; a zero demand counts as fully met.
pub fn dfs(problem: &AllocationProblem, allocation: &Allocation) -> Result<Vec<f64>> {
    problem.check_len(allocation.users())?;
    Ok(allocation
        .amounts
        .iter()
        .zip(problem.demands())
        .map(|(&x, &c)| if c == 0.0 { 1.0 } else { x / c })
        .collect())
}

/// Player satisfaction `(x_i - min_i) / (max_i - min_i)`.
///
/// Every rate is 1 when the estate covers all demands, and a user whose
/// range is empty (for instance a zero demand) is at 1 as well.
pub fn ps(problem: &AllocationProblem, allocation: &Allocation) -> Result<Vec<f64>> {
    problem.check_len(allocation.users())?;
    if problem.is_degenerate() {
        return Ok(vec![1.0; problem.users()]);
    }
    let rights = problem.rights_profile();
    let tol = empty_range_tolerance(problem);
    Ok(allocation
        .amounts
        .iter()
        .zip(rights.min_rights.iter().zip(&rights.max_rights))
        .map(|(&x, (&lo, &hi))| if hi - lo <= tol { 1.0 } else { (x - lo) / (hi - lo) })
        .collect())
}

fn empty_range_tolerance(problem: &AllocationProblem) -> f64 {
    1e-3 * scaled_tolerance(problem.estate())
}

/// PS of user `i` through the closed form of its greedy/moderate case:
///
/// | case | formula |
/// |------|---------|
/// | Gm | `x / c` |
/// | Gg | `x / E` |
/// | Mm | `(x - v(i)) / (c - v(i))` |
/// | Mg | `(x - v(i)) / (E - v(i))` |
pub fn ps_by_case(problem: &AllocationProblem, allocation: &Allocation, i: usize) -> Result<f64> {
    problem.check_len(allocation.users())?;
    let case = problem.classify_user(i)?;
    if problem.is_degenerate() {
        return Ok(1.0);
    }
    let x = allocation.amounts[i];
    let c = problem.demands()[i];
    let e = problem.estate();
    let v = problem.min_right(i)?;
    let (num, den) = match case {
        UserCase::Gm => (x, c),
        UserCase::Gg => (x, e),
        UserCase::Mm => (x - v, c - v),
        UserCase::Mg => (x - v, e - v),
    };
    Ok(if den <= empty_range_tolerance(problem) { 1.0 } else { num / den })
}

/// Propensity to disrupt of a proper, non-empty coalition:
/// `(x(N \ S) - v(N \ S)) / (x(S) - v(S))`.
///
/// A zero denominator gives `+inf` when the complement still has something
/// to lose and `0` when it does not.
pub fn propensity_to_disrupt(
    problem: &AllocationProblem,
    allocation: &Allocation,
    coalition: Coalition,
) -> Result<f64> {
    let n = problem.users();
    problem.check_len(allocation.users())?;
    if coalition.is_empty() || coalition == Coalition::grand(n) {
        return Err(Error::Domain(
            "propensity to disrupt needs a coalition other than the empty and grand ones".into(),
        ));
    }
    let complement = coalition.complement(n);
    let v_s = problem.characteristic_value(coalition)?;
    let v_rest = problem.characteristic_value(complement)?;
    let x_s: f64 = coalition.members().map(|i| allocation.amounts[i]).sum();
    let x_rest: f64 = complement.members().map(|i| allocation.amounts[i]).sum();
    let gain = x_s - v_s;
    let loss = x_rest - v_rest;
    let tol = empty_range_tolerance(problem);
    if gain.abs() <= tol {
        return Ok(if loss > tol { f64::INFINITY } else { 0.0 });
    }
    Ok(loss / gain)
}

fn singleton_propensities(problem: &AllocationProblem, allocation: &Allocation) -> Result<Vec<f64>> {
    let n = problem.users();
    if n < 2 || n > Coalition::MAX_USERS {
        return Ok(vec![0.0; n]);
    }
    (0..n)
        .map(|i| propensity_to_disrupt(problem, allocation, Coalition::singleton(i)?))
        .collect()
}

/// `(sum r)^2 / (n sum r^2)`; `None` when every rate is zero.
pub fn squared_mean_index(rates: &[f64]) -> Option<f64> {
    let sum: f64 = rates.iter().sum();
    let sum_sq: f64 = rates.iter().map(|r| r * r).sum();
    if rates.is_empty() || sum_sq == 0.0 {
        return None;
    }
    Some(sum * sum / (rates.len() as f64 * sum_sq))
}

/// Jain's index over DFS rates.
pub fn jain_index(problem: &AllocationProblem, allocation: &Allocation) -> Result<f64> {
    squared_mean_index(&dfs(problem, allocation)?).ok_or(Error::UndefinedIndex("Jain's index"))
}

/// Player fairness index: Jain's form over PS rates.
pub fn player_fairness_index(problem: &AllocationProblem, allocation: &Allocation) -> Result<f64> {
    squared_mean_index(&ps(problem, allocation)?)
        .ok_or(Error::UndefinedIndex("player fairness index"))
}
