//! Minimal and maximal rights, the mood, and the four steps that build the
//! mood value.

use fairdiv::rules::mood_value_steps;
use fairdiv::{AllocationProblem, Coalition};

fn main() -> fairdiv::Result<()> {
    let problem = AllocationProblem::new(vec![3.0, 13.0, 2.0], 10.0)?;
    let n = problem.users();

    println!("coalition values:");
    for mask in 1..(1u64 << n) {
        let s = Coalition::from_mask(mask);
        let members: Vec<usize> = s.members().map(|i| i + 1).collect();
        println!("  v({members:?}) = {}", problem.characteristic_value(s)?);
    }

    let rights = problem.rights_profile();
    for i in 0..n {
        println!(
            "user {}: claims {:>4}, rights [{}, {}], case {}",
            i + 1,
            problem.demands()[i],
            rights.min_rights[i],
            rights.max_rights[i],
            problem.classify_user(i)?
        );
    }
    println!("mood m = {}", rights.mood);

    let steps = mood_value_steps(&problem);
    println!("1. pay minimal rights      {:?}", steps.min_rights);
    println!("2. reduced problem         c' = {:?}, E' = {}", steps.reduced_demands, steps.reduced_estate);
    println!("3. weighted proportional   {:?}", steps.reduced_allocation);
    println!("4. add back                {:?}", steps.allocation.amounts);
    Ok(())
}
