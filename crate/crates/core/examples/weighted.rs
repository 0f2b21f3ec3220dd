//! Weighted proportional division by water-filling, capped at each claim.

use fairdiv::rules::weighted_proportional;
use fairdiv::{AllocationProblem, WeightVector};

fn main() -> fairdiv::Result<()> {
    let problem = AllocationProblem::new(vec![1.0, 10.0, 10.0], 9.0)?;
    for weights in [vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 1.0], vec![5.0, 1.0, 1.0]] {
        let w = WeightVector::new(weights.clone())?;
        let x = weighted_proportional(&problem, &w)?;
        println!("weights {weights:?} -> {:.4?}", x.amounts);
    }
    Ok(())
}
