//! Demand-fulfillment and progressive satisfaction rates side by side.

use fairdiv::rules::{mmf, mood_value, proportional};
use fairdiv::{AllocationProblem, SatisfactionReport};

fn main() -> fairdiv::Result<()> {
    let problem = AllocationProblem::new(vec![4.0, 9.0], 5.0)?;
    for (name, x) in [("prop", proportional(&problem)), ("mmf", mmf(&problem)), ("mood", mood_value(&problem))] {
        let report = SatisfactionReport::new(&problem, &x)?;
        println!("{name}: x = {:?}", x.amounts);
        for i in 0..problem.users() {
            println!(
                "  user {} ({}): dfs {:.4}  ps {:.4}  propensity {:.4}",
                i + 1,
                report.cases[i],
                report.dfs[i],
                report.ps[i],
                report.propensity[i]
            );
        }
        println!("  jain {:.4}, player fairness {:.4}", report.jain, report.player_fairness);
    }
    Ok(())
}
