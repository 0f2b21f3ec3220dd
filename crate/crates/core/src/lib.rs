//! Fair division of a scarce, divisible resource among claimants.
//!
//! A problem is a vector of demands and an estate smaller than their sum.
//! The crate provides:
//!
//! - [`problem`]: the problem type, its bankruptcy game `v(S)`, minimal and
//!   maximal rights, and the greedy/moderate user classification;
//! - [`rules`]: proportional, weighted proportional, max-min fair, CEL,
//!   Shapley, nucleolus (Talmud) and the mood value, which gives every user
//!   the same position inside its core range;
//! - [`fairness`]: DFS and PS satisfaction rates, Jain's index, the player
//!   fairness index and the propensity to disrupt;
//! - [`oracle`]: brute-force verifiers for the closed forms;
//! - [`sim`]: seeded Monte-Carlo sweeps over the estate-to-demand ratio;
//! - [`cli`]: the `fairdiv` command line.
//!
//! ```
//! use fairdiv::{AllocationProblem, rules, fairness};
//!
//! let problem = AllocationProblem::new(vec![3.0, 13.0, 2.0], 10.0)?;
//! let mood = rules::mood_value(&problem);
//! assert_eq!(mood.amounts, vec![1.5, 7.5, 1.0]);
//! assert_eq!(fairness::player_fairness_index(&problem, &mood)?, 1.0);
//! # Ok::<(), fairdiv::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod fairness;
pub mod oracle;
pub mod problem;
pub mod rng;
pub mod rules;
pub mod sim;

pub use error::{Error, Result};
pub use fairness::SatisfactionReport;
pub use problem::{AllocationProblem, Coalition, RightsProfile, UserCase, TOLERANCE};
pub use rules::{Allocation, Rule, WeightVector};
