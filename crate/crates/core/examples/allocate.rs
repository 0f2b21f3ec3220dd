//! Every rule on one bankruptcy problem, with its Jain index.
//!
//! `cargo run --example allocate -- 3 13 2 --estate 10`

use fairdiv::fairness::jain_index;
use fairdiv::{AllocationProblem, Rule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (demands, estate) = match args.iter().position(|a| a == "--estate") {
        Some(at) => {
            let demands = args[..at].iter().map(|s| s.parse()).collect::<Result<Vec<f64>, _>>()?;
            (demands, args.get(at + 1).ok_or("missing estate")?.parse()?)
        }
        None => (vec![3.0, 13.0, 2.0], 10.0),
    };
    let problem = AllocationProblem::new(demands, estate)?;
    println!("demands {:?}, estate {}", problem.demands(), problem.estate());
    println!("{:<10} {:>28} {:>8}", "rule", "allocation", "jain");
    for rule in Rule::ALL {
        let x = rule.apply(&problem)?;
        let shown: Vec<String> = x.amounts.iter().map(|a| format!("{a:.3}")).collect();
        println!("{:<10} {:>28} {:>8.4}", rule.id(), shown.join(" "), jain_index(&problem, &x)?);
    }
    Ok(())
}
