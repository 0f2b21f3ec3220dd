//! Checks a claimed nucleolus three ways: the Talmud closed form, an exact
//! search on a rational lattice, and random lexicographic probing.

use fairdiv::oracle::{grid_nucleolus, lexicographic_dominance_check, DominanceCheck, ExcessVector};
use fairdiv::rules::nucleolus;
use fairdiv::AllocationProblem;

fn main() -> fairdiv::Result<()> {
    let problem = AllocationProblem::new(vec![3.0, 13.0, 2.0], 10.0)?;
    let talmud = nucleolus(&problem).amounts;
    let lattice = grid_nucleolus(&[3, 13, 2], 10, 24)?;
    println!("talmud  {talmud:?}");
    println!("lattice {lattice:?}");

    for candidate in [talmud, vec![1.0, 8.0, 1.0]] {
        let theta = ExcessVector::new(&problem, &candidate)?;
        println!("\ncandidate {candidate:?}\n  sorted excesses {:?}", theta.values());
        match lexicographic_dominance_check(&problem, &candidate, 10_000, 1)? {
            DominanceCheck::Consistent { trials } => println!("  no better imputation in {trials} samples"),
            DominanceCheck::Refuted { trial, witness, witness_excess, .. } => {
                println!("  beaten at sample {trial} by {witness:.4?}");
                println!("  whose excesses are {:.4?}", witness_excess.values());
            }
        }
    }
    Ok(())
}
