//! Monte-Carlo sweep over the estate-to-demand ratio: mean fairness indices
//! per rule and the share of users in each case.
//!
//! `cargo run --release --example sweep -- weibull:1.4,40 5`

use fairdiv::sim::{run_sweep, IndexKind, SweepConfig};
use fairdiv::{Rule, UserCase};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dist = args.next().unwrap_or_else(|| "uniform:0,100".into()).parse()?;
    let users = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let config = SweepConfig::new(dist, users, 42);
    let out = run_sweep(&config)?;
    println!("{} instances of {} users", out.instances, users);

    let rules = [Rule::Proportional, Rule::Mmf, Rule::Shapley, Rule::Nucleolus, Rule::Mood];
    for index in [IndexKind::Jain, IndexKind::PlayerFairness] {
        println!("\nmean {}", index.id());
        print!("{:>6}", "ratio");
        for rule in rules {
            print!("{:>10}", rule.id());
        }
        println!();
        for &ratio in &config.ratios {
            print!("{ratio:>6.2}");
            for rule in rules {
                let r = out.indices.iter().find(|r| r.ratio == ratio && r.rule == rule && r.index == index).unwrap();
                print!("{:>10.4}", r.mean);
            }
            println!();
        }
    }

    println!("\ncase shares");
    for c in &out.cases {
        let shares: Vec<String> = UserCase::ALL.iter().map(|k| format!("{k} {:.3}", c.fraction(*k))).collect();
        println!("{:>6.2}  {}", c.ratio, shares.join("  "));
    }
    Ok(())
}
