//! Box statistics of DFS and PS pooled over users and instances, for a
//! nearly rich and a very poor estate.

use fairdiv::sim::{satisfaction_boxstats, DemandDistribution, SweepConfig};

fn main() -> fairdiv::Result<()> {
    let base = SweepConfig::new(DemandDistribution::uniform(0.0, 100.0)?, 3, 42);
    for (users, out) in satisfaction_boxstats(&base, &[3, 6])? {
        println!("{users} users");
        for b in &out.boxes {
            let s = b.stats;
            println!(
                "  ratio {:.2} {:<10} {:<4} min {:.3} q1 {:.3} median {:.3} q3 {:.3} max {:.3}",
                b.ratio,
                b.rule.id(),
                b.rate.id(),
                s.min,
                s.q1,
                s.median,
                s.q3,
                s.max
            );
        }
    }
    Ok(())
}
