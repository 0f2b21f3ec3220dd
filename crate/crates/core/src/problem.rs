//! Bankruptcy problems and their coalitional game.
//!
//! An [`AllocationProblem`] is a demand vector `c` and an estate `E` with
//! `sum(c) >= E`. The associated game gives every coalition `S` the part of
//! the estate left once everybody outside `S` has been paid in full:
//!
//! ```text
//! v(S) = max(E - sum_{i not in S} c_i, 0)
//! ```
//!
//! Values are evaluated on demand in `O(n)`; nothing here enumerates the
//! `2^n` coalitions. User indices are zero-based throughout the crate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used by invariant checks on unit-scale quantities.
pub const TOLERANCE: f64 = 1e-9;

/// Tolerance scaled to the magnitude of `value` (never below [`TOLERANCE`]).
pub(crate) fn scaled_tolerance(value: f64) -> f64 {
    TOLERANCE * value.abs().max(1.0)
}

/// A demand vector together with the estate to divide.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationProblem {
    demands: Vec<f64>,
    estate: f64,
    #[serde(skip)]
    total: f64,
}

impl AllocationProblem {
    /// Builds a problem, rejecting anything outside the bankruptcy regime.
    ///
    /// A total demand equal to the estate (up to [`TOLERANCE`], scaled) is
    /// accepted as the degenerate case where every claim can be met.
    pub fn new(demands: Vec<f64>, estate: f64) -> Result<Self> {
        if demands.is_empty() {
            return Err(Error::NoUsers);
        }
        if let Some((index, &value)) = demands
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_finite() || **c < 0.0)
        {
            return Err(Error::InvalidDemand { index, value });
        }
        if !estate.is_finite() || estate < 0.0 {
            return Err(Error::InvalidEstate(estate));
        }
        if demands.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroTotalDemand);
        }
        let total: f64 = demands.iter().sum();
        if estate - total > scaled_tolerance(total) {
            return Err(Error::NotBankrupt { total, estate });
        }
        Ok(Self { demands, estate, total })
    }

    pub fn demands(&self) -> &[f64] {
        &self.demands
    }

    pub fn estate(&self) -> f64 {
        self.estate
    }

    pub fn users(&self) -> usize {
        self.demands.len()
    }

    pub fn total_demand(&self) -> f64 {
        self.total
    }

    /// True when the estate covers every demand exactly.
    pub fn is_degenerate(&self) -> bool {
        self.total - self.estate <= scaled_tolerance(self.estate)
    }

    /// Same problem with demands and estate multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Domain(format!("scale factor must be positive, got {factor}")));
        }
        Self::new(self.demands.iter().map(|c| c * factor).collect(), self.estate * factor)
    }

    /// Characteristic function of the bankruptcy game.
    pub fn characteristic_value(&self, coalition: Coalition) -> Result<f64> {
        let n = self.users();
        if let Some(index) = coalition.first_index_at_or_above(n) {
            return Err(Error::InvalidCoalition { index, users: n });
        }
        Ok(self.value_unchecked(coalition.mask()))
    }

    pub(crate) fn value_unchecked(&self, mask: u64) -> f64 {
        let n = self.users();
        if mask == 0 {
            return 0.0;
        }
        if mask == full_mask(n) {
            return self.estate;
        }
        let outside: f64 = (0..n)
            .filter(|i| mask & (1u64 << i) == 0)
            .map(|i| self.demands[i])
            .sum();
        (self.estate - outside).max(0.0)
    }

    /// Minimal right `v({i})`.
    pub fn min_right(&self, i: usize) -> Result<f64> {
        self.check_user(i)?;
        Ok(self.min_right_unchecked(i))
    }

    fn min_right_unchecked(&self, i: usize) -> f64 {
        if self.is_degenerate() {
            return self.demands[i];
        }
        (self.estate - (self.total - self.demands[i])).max(0.0)
    }

    /// Maximal right `v(N) - v(N \ {i})`, which reduces to `min(c_i, E)`.
    pub fn max_right(&self, i: usize) -> Result<f64> {
        self.check_user(i)?;
        Ok(self.max_right_unchecked(i))
    }

    fn max_right_unchecked(&self, i: usize) -> f64 {
        self.demands[i].min(self.estate)
    }

    /// Minimal and maximal rights of every user plus the common mood.
    pub fn rights_profile(&self) -> RightsProfile {
        let n = self.users();
        let min_rights: Vec<f64> = (0..n).map(|i| self.min_right_unchecked(i)).collect();
        let max_rights: Vec<f64> = (0..n).map(|i| self.max_right_unchecked(i)).collect();
        let low: f64 = min_rights.iter().sum();
        let high: f64 = max_rights.iter().sum();
        let range = high - low;
        // A collapsed range (degenerate problem, zero estate, a single
        // positive claimant) leaves one feasible allocation; its PS is 1.
        let mood = if self.is_degenerate() || range <= scaled_tolerance(self.estate) {
            1.0
        } else {
            ((self.estate - low) / range).clamp(0.0, 1.0)
        };
        RightsProfile { min_rights, max_rights, mood }
    }

    /// Greedy/moderate classification of user `i`.
    pub fn classify_user(&self, i: usize) -> Result<UserCase> {
        self.check_user(i)?;
        Ok(self.classify_unchecked(i))
    }

    pub(crate) fn classify_unchecked(&self, i: usize) -> UserCase {
        let moderate_group = self.min_right_unchecked(i) > 0.0;
        let greedy = self.demands[i] >= self.estate;
        match (moderate_group, greedy) {
            (false, false) => UserCase::Gm,
            (false, true) => UserCase::Gg,
            (true, false) => UserCase::Mm,
            (true, true) => UserCase::Mg,
        }
    }

    /// Cases of all users, in index order.
    pub fn classify_all(&self) -> Vec<UserCase> {
        (0..self.users()).map(|i| self.classify_unchecked(i)).collect()
    }

    pub(crate) fn check_user(&self, i: usize) -> Result<()> {
        if i >= self.users() {
            return Err(Error::InvalidCoalition { index: i, users: self.users() });
        }
        Ok(())
    }

    pub(crate) fn check_len(&self, found: usize) -> Result<()> {
        if found != self.users() {
            return Err(Error::LengthMismatch { expected: self.users(), found });
        }
        Ok(())
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A set of users, stored as a bit mask (so at most 64 users).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Coalition(u64);

impl Coalition {
    pub const MAX_USERS: usize = 64;

    pub const fn empty() -> Self {
        Coalition(0)
    }

    pub fn grand(users: usize) -> Self {
        Coalition(full_mask(users))
    }

    pub fn from_mask(mask: u64) -> Self {
        Coalition(mask)
    }

    pub fn singleton(i: usize) -> Result<Self> {
        Self::from_indices([i])
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut mask = 0u64;
        for i in indices {
            if i >= Self::MAX_USERS {
                return Err(Error::InvalidCoalition { index: i, users: Self::MAX_USERS });
            }
            mask |= 1u64 << i;
        }
        Ok(Coalition(mask))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < Self::MAX_USERS && self.0 & (1u64 << i) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Coalition {
        Coalition(self.0 & other.0)
    }

    /// Complement within a game of `users` players.
    pub fn complement(self, users: usize) -> Coalition {
        Coalition(!self.0 & full_mask(users))
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..Self::MAX_USERS).filter(move |&i| self.0 & (1u64 << i) != 0)
    }

    fn first_index_at_or_above(self, n: usize) -> Option<usize> {
        if n >= Self::MAX_USERS {
            return None;
        }
        let above = self.0 >> n;
        (above != 0).then(|| n + above.trailing_zeros() as usize)
    }
}

/// Per-user feasible range inside the core plus the common mood `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RightsProfile {
    pub min_rights: Vec<f64>,
    pub max_rights: Vec<f64>,
    pub mood: f64,
}

impl RightsProfile {
    pub fn users(&self) -> usize {
        self.min_rights.len()
    }
}

/// Greedy/moderate label of a user.
///
/// The first letter describes the other `n - 1` users (`G`: their demands
/// cover the estate, so `v({i}) = 0`; `M`: they do not). The second letter
/// describes the user itself (`g`: demand at least the estate; `m`: below).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UserCase {
    Gm,
    Gg,
    Mm,
    Mg,
}

impl UserCase {
    pub const ALL: [UserCase; 4] = [UserCase::Gm, UserCase::Gg, UserCase::Mm, UserCase::Mg];

    pub fn label(self) -> &'static str {
        match self {
            UserCase::Gm => "Gm",
            UserCase::Gg => "Gg",
            UserCase::Mm => "Mm",
            UserCase::Mg => "Mg",
        }
    }
}

impl fmt::Display for UserCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}
