#![allow(dead_code)]

use fairdiv::rng::{self, Stream};
use fairdiv::sim::{generate_demands, make_instance, DemandDistribution};
use fairdiv::AllocationProblem;

pub fn uniform() -> DemandDistribution {
    DemandDistribution::uniform(0.0, 100.0).unwrap()
}

pub fn weibull() -> DemandDistribution {
    DemandDistribution::weibull(1.4, 40.0).unwrap()
}

/// Random bankruptcy problem with `lo..=hi` users; odd streams use Weibull
/// demands, even streams uniform ones. The ratio avoids the open ends.
pub fn random_problem(seed: u64, id: u64, lo: usize, hi: usize) -> AllocationProblem {
    let mut s = rng::stream(seed, id);
    let n = lo + rng::index(&mut s, hi - lo + 1);
    let dist = if id % 2 == 0 { uniform() } else { weibull() };
    let demands = generate_demands(&dist, n, &mut s);
    let ratio = 0.01 + 0.98 * rng::unit(&mut s);
    make_instance(demands, ratio).unwrap()
}

pub fn stream(seed: u64, id: u64) -> Stream {
    rng::stream(seed, id)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
