//! Brute-force verifiers.
//!
//! Everything here is deliberately naive: coalition values are recomputed
//! from the definition, Shapley values come from averaging over orders, and
//! the nucleolus is probed by comparing sorted excess vectors. These routines
//! check the closed forms in [`crate::rules`] and never share code with them.

use std::cmp::Ordering;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{scaled_tolerance, AllocationProblem};
use crate::rng;
use crate::rules::Allocation;

pub const TABLE_MAX_USERS: usize = 12;
pub const CORE_MAX_USERS: usize = 20;
pub const PERMUTATION_MAX_USERS: usize = 8;
pub const GRID_NUCLEOLUS_MAX_USERS: usize = 4;

fn ensure_capacity(problem: &AllocationProblem, what: &'static str, limit: usize) -> Result<()> {
    if problem.users() > limit {
        return Err(Error::TooManyUsers { what, limit, users: problem.users() });
    }
    Ok(())
}

fn value_by_definition(demands: &[f64], estate: f64, mask: usize) -> f64 {
    if mask == 0 {
        return 0.0;
    }
    let outside: f64 = demands
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) == 0)
        .map(|(_, c)| c)
        .sum();
    (estate - outside).max(0.0)
}

/// `v(S)` for every mask `S` in `0..2^n` (`n <= 12`).
pub fn characteristic_table(problem: &AllocationProblem) -> Result<Vec<f64>> {
    ensure_capacity(problem, "characteristic table", TABLE_MAX_USERS)?;
    let n = problem.users();
    Ok((0..1usize << n)
        .map(|mask| value_by_definition(problem.demands(), problem.estate(), mask))
        .collect())
}

/// Efficiency plus `x(S) >= v(S) - 1e-9` for every coalition.
pub fn core_membership(problem: &AllocationProblem, allocation: &Allocation) -> Result<bool> {
    ensure_capacity(problem, "core membership", CORE_MAX_USERS)?;
    problem.check_len(allocation.users())?;
    let n = problem.users();
    let x = &allocation.amounts;
    let estate = problem.estate();
    if (x.iter().sum::<f64>() - estate).abs() > scaled_tolerance(estate) {
        return Ok(false);
    }
    let full = (1usize << n) - 1;
    for mask in 1..full {
        let held: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| x[i]).sum();
        if held < value_by_definition(problem.demands(), estate, mask) - 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shapley value as the mean marginal-contribution vector over all `n!`
/// orders (`n <= 8`).
pub fn shapley_by_permutations(problem: &AllocationProblem) -> Result<Allocation> {
    ensure_capacity(problem, "permutation Shapley", PERMUTATION_MAX_USERS)?;
    let n = problem.users();
    let mut phi = vec![0.0; n];
    let mut orders = 0usize;
    for order in (0..n).permutations(n) {
        let mut mask = 0usize;
        let mut before = 0.0;
        for i in order {
            mask |= 1 << i;
            let after = value_by_definition(problem.demands(), problem.estate(), mask);
            phi[i] += after - before;
            before = after;
        }
        orders += 1;
    }
    for p in &mut phi {
        *p /= orders as f64;
    }
    Ok(Allocation::new(phi, None))
}

/// Excesses `v(S) - x(S)` of the `2^n - 1` non-empty coalitions, sorted in
/// decreasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcessVector(Vec<f64>);

impl ExcessVector {
    pub fn new(problem: &AllocationProblem, x: &[f64]) -> Result<Self> {
        ensure_capacity(problem, "excess vector", TABLE_MAX_USERS)?;
        problem.check_len(x.len())?;
        let n = problem.users();
        let mut excesses: Vec<f64> = (1..1usize << n)
            .map(|mask| {
                let held: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| x[i]).sum();
                value_by_definition(problem.demands(), problem.estate(), mask) - held
            })
            .collect();
        excesses.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(excesses))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Lexicographic comparison; entries within `tol` count as equal.
    pub fn lex_cmp(&self, other: &ExcessVector, tol: f64) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            if (a - b).abs() > tol {
                return a.total_cmp(b);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

/// Outcome of [`lexicographic_dominance_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DominanceCheck {
    /// No sampled imputation beat the candidate.
    Consistent { trials: usize },
    /// `witness` has a lexicographically smaller excess vector.
    Refuted {
        trial: usize,
        witness: Vec<f64>,
        candidate_excess: ExcessVector,
        witness_excess: ExcessVector,
    },
}

impl DominanceCheck {
    pub fn holds(&self) -> bool {
        matches!(self, DominanceCheck::Consistent { .. })
    }
}

/// Default number of sampled imputations for the nucleolus check.
pub const DEFAULT_TRIALS: usize = 10_000;
/// Seed used by the test suites for the nucleolus check.
pub const DEFAULT_SEED: u64 = 0x6e75_636c;

const LEX_TOLERANCE: f64 = 1e-9;

/// Samples imputations and checks that none has a smaller sorted excess
/// vector than `candidate`.
///
/// Trials cycle through three kinds of challenger: a uniform point of the
/// imputation set; `candidate` moved by a random zero-sum step; and
/// `candidate` with an amount transferred between two random users, which
/// keeps every other coordinate (and so any tight face) fixed. Step sizes
/// are log-uniform in `[1e-6, 1e-1] * E`, and perturbed points are projected
/// back onto the imputation set. Trial `t`
/// uses stream `t` of `seed`, and the reported witness is the one with the
/// lowest trial index, so the result does not depend on scheduling.
pub fn lexicographic_dominance_check(
    problem: &AllocationProblem,
    candidate: &[f64],
    trials: usize,
    seed: u64,
) -> Result<DominanceCheck> {
    ensure_capacity(problem, "nucleolus check", TABLE_MAX_USERS)?;
    problem.check_len(candidate.len())?;
    let rights = problem.rights_profile();
    let lower = rights.min_rights;
    let estate = problem.estate();
    let tol = scaled_tolerance(estate);
    let efficient = (candidate.iter().sum::<f64>() - estate).abs() <= tol;
    let rational = candidate.iter().zip(&lower).all(|(x, lo)| *x >= lo - tol);
    if !(efficient && rational) {
        return Err(Error::Domain(format!("{candidate:?} is not an imputation")));
    }
    let candidate_excess = ExcessVector::new(problem, candidate)?;
    let spare = (estate - lower.iter().sum::<f64>()).max(0.0);

    let refutation = (0..trials).into_par_iter().find_map_first(|trial| {
        let mut stream = rng::stream(seed, trial as u64);
        let y = match trial % 3 {
            0 => random_imputation(&mut stream, &lower, spare),
            1 => transferred_imputation(&mut stream, candidate, &lower, estate),
            _ => perturbed_imputation(&mut stream, candidate, &lower, spare, estate),
        };
        let excess = ExcessVector::new(problem, &y).ok()?;
        (excess.lex_cmp(&candidate_excess, LEX_TOLERANCE) == Ordering::Less).then_some((trial, y, excess))
    });

    Ok(match refutation {
        None => DominanceCheck::Consistent { trials },
        Some((trial, witness, witness_excess)) => DominanceCheck::Refuted {
            trial,
            witness,
            candidate_excess,
            witness_excess,
        },
    })
}

fn random_imputation(stream: &mut rng::Stream, lower: &[f64], spare: f64) -> Vec<f64> {
    let draws: Vec<f64> = lower.iter().map(|_| rng::exponential(stream)).collect();
    let total: f64 = draws.iter().sum();
    lower
        .iter()
        .zip(draws)
        .map(|(lo, g)| if total > 0.0 { lo + spare * g / total } else { *lo })
        .collect()
}

fn step_size(stream: &mut rng::Stream, estate: f64) -> f64 {
    estate * 10f64.powf(-6.0 + 5.0 * rng::unit(stream))
}

fn transferred_imputation(
    stream: &mut rng::Stream,
    candidate: &[f64],
    lower: &[f64],
    estate: f64,
) -> Vec<f64> {
    let n = candidate.len();
    let mut y = candidate.to_vec();
    if n < 2 {
        return y;
    }
    let from = rng::index(stream, n);
    let to = (from + 1 + rng::index(stream, n - 1)) % n;
    let amount = step_size(stream, estate).min((y[from] - lower[from]).max(0.0));
    y[from] -= amount;
    y[to] += amount;
    y
}

fn perturbed_imputation(
    stream: &mut rng::Stream,
    candidate: &[f64],
    lower: &[f64],
    spare: f64,
    estate: f64,
) -> Vec<f64> {
    let n = candidate.len();
    let mut direction: Vec<f64> = (0..n).map(|_| rng::unit(stream) - 0.5).collect();
    let mean = direction.iter().sum::<f64>() / n as f64;
    direction.iter_mut().for_each(|d| *d -= mean);
    let norm: f64 = direction.iter().map(|d| d.abs()).sum();
    let size = step_size(stream, estate);
    let shifted: Vec<f64> = candidate
        .iter()
        .zip(&direction)
        .zip(lower)
        .map(|((x, d), lo)| x + if norm > 0.0 { size * d / norm } else { 0.0 } - lo)
        .collect();
    project_to_simplex(&shifted, spare)
        .into_iter()
        .zip(lower)
        .map(|(w, lo)| w + lo)
        .collect()
}

/// Euclidean projection onto `{w >= 0, sum w = total}`.
fn project_to_simplex(point: &[f64], total: f64) -> Vec<f64> {
    if total <= 0.0 {
        return vec![0.0; point.len()];
    }
    let mut sorted = point.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut shift = 0.0;
    for (j, u) in sorted.iter().enumerate() {
        prefix += u;
        let candidate = (prefix - total) / (j + 1) as f64;
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    point.iter().map(|w| (w - shift).max(0.0)).collect()
}

/// Exact lexicographic minimizer of the excess vector over a lattice of
/// imputations, for integer claims and estate and `n <= 4`.
///
/// Amounts are multiples of `1 / denominator`; with `denominator = 24` the
/// lattice contains the nucleolus of every integer problem with up to four
/// users. All arithmetic is on integers, so ties are exact.
pub fn grid_nucleolus(claims: &[u32], estate: u32, denominator: u32) -> Result<Vec<f64>> {
    let n = claims.len();
    if n == 0 {
        return Err(Error::NoUsers);
    }
    if n > GRID_NUCLEOLUS_MAX_USERS {
        return Err(Error::TooManyUsers {
            what: "grid nucleolus",
            limit: GRID_NUCLEOLUS_MAX_USERS,
            users: n,
        });
    }
    let d = denominator as i64;
    let c: Vec<i64> = claims.iter().map(|&c| c as i64 * d).collect();
    let e = estate as i64 * d;
    if c.iter().sum::<i64>() < e {
        return Err(Error::NotBankrupt {
            total: claims.iter().map(|&c| c as f64).sum(),
            estate: estate as f64,
        });
    }
    let value = |mask: usize| -> i64 {
        let outside: i64 = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| c[i]).sum();
        (e - outside).max(0)
    };
    let lower: Vec<i64> = (0..n).map(|i| value(1 << i)).collect();
    let theta = |x: &[i64]| -> Vec<i64> {
        let mut ex: Vec<i64> = (1..1usize << n)
            .map(|mask| {
                let held: i64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| x[i]).sum();
                value(mask) - held
            })
            .collect();
        ex.sort_unstable_by(|a, b| b.cmp(a));
        ex
    };

    let mut best: Option<(Vec<i64>, Vec<i64>)> = None;
    let mut x = vec![0i64; n];
    fn visit(
        i: usize,
        left: i64,
        lower: &[i64],
        x: &mut Vec<i64>,
        theta: &dyn Fn(&[i64]) -> Vec<i64>,
        best: &mut Option<(Vec<i64>, Vec<i64>)>,
    ) {
        let n = x.len();
        if i + 1 == n {
            if left < lower[i] {
                return;
            }
            x[i] = left;
            let t = theta(x);
            if best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                *best = Some((t, x.clone()));
            }
            return;
        }
        let reserve: i64 = lower[i + 1..].iter().sum();
        let mut amount = lower[i];
        while amount <= left - reserve {
            x[i] = amount;
            visit(i + 1, left - amount, lower, x, theta, best);
            amount += 1;
        }
    }
    visit(0, e, &lower, &mut x, &theta, &mut best);
    let (_, x) = best.ok_or_else(|| Error::Domain("empty imputation set".into()))?;
    Ok(x.into_iter().map(|v| v as f64 / d as f64).collect())
}
