//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p fairdiv --test acceptance`.

mod common;

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use common::{max_abs_diff, random_problem, stream, uniform, weibull};
use fairdiv::fairness::{
    dfs, jain_index, player_fairness_index, propensity_to_disrupt, ps, ps_by_case,
};
use fairdiv::oracle::{
    core_membership, grid_nucleolus, lexicographic_dominance_check, shapley_by_permutations,
    DominanceCheck, ExcessVector, DEFAULT_SEED, DEFAULT_TRIALS,
};
use fairdiv::rng;
use fairdiv::rules::{
    cel, mmf, mood_value, mood_value_4step, mood_value_steps, nucleolus, proportional, shapley,
};
use fairdiv::sim::{run_sweep, IndexKind, SweepConfig, SweepOutput};
use fairdiv::{AllocationProblem, Coalition, Rule, UserCase};

type Outcome = Result<String, String>;

fn running() -> AllocationProblem {
    AllocationProblem::new(vec![3.0, 13.0, 2.0], 10.0).unwrap()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(got: &[f64], want: &[f64], tol: f64, what: &str) -> Result<(), String> {
    let diff = max_abs_diff(got, want);
    check(diff <= tol, || format!("{what}: got {got:?}, want {want:?} (max diff {diff:.3e} > {tol:e})"))
}

fn time_limit(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    check(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn reference_allocations() -> Outcome {
    let start = Instant::now();
    let p = running();
    within(&proportional(&p).amounts, &[1.67, 7.22, 1.11], 0.01, "proportional")?;
    within(&mmf(&p).amounts, &[3.0, 5.0, 2.0], 0.01, "mmf")?;
    within(&shapley(&p).unwrap().amounts, &[1.5, 7.5, 1.0], 0.01, "shapley")?;
    within(&cel(&p).amounts, &[0.0, 10.0, 0.0], 0.01, "cel")?;
    let jain: Vec<f64> = [proportional(&p), mmf(&p), shapley(&p).unwrap(), cel(&p)]
        .iter()
        .map(|x| jain_index(&p, x).unwrap())
        .collect();
    within(&jain, &[1.0, 0.882, 0.995, 0.333], 0.001, "Jain prop/mmf/shapley/cel")?;
    let elapsed = start.elapsed();
    time_limit(elapsed, Duration::from_secs(1), "reference allocations")?;
    Ok(format!("jain = {:.4?} in {elapsed:.1?}", jain))
}

fn nucleolus_of_running_problem() -> Outcome {
    let p = running();
    let talmud = nucleolus(&p).amounts;
    within(&talmud, &[1.5, 7.5, 1.0], 1e-12, "Talmud nucleolus")?;
    let grid = grid_nucleolus(&[3, 13, 2], 10, 24).unwrap();
    within(&grid, &talmud, 1e-12, "exact lattice minimizer")?;
    let confirm = lexicographic_dominance_check(&p, &talmud, DEFAULT_TRIALS, DEFAULT_SEED).unwrap();
    check(confirm.holds(), || format!("sampled imputation beats Talmud: {confirm:?}"))?;
    let rival = [1.0, 8.0, 1.0];
    let refute = lexicographic_dominance_check(&p, &rival, DEFAULT_TRIALS, DEFAULT_SEED).unwrap();
    let DominanceCheck::Refuted { trial, witness, .. } = &refute else {
        return Err("oracle failed to refute (1, 8, 1)".into());
    };
    let theta_talmud = ExcessVector::new(&p, &talmud).unwrap();
    let theta_rival = ExcessVector::new(&p, &rival).unwrap();
    // The leading 0 is the grand coalition's excess.
    within(theta_talmud.values(), &[0.0, -1.0, -1.0, -1.5, -1.5, -2.5, -2.5], 1e-12, "theta(1.5,7.5,1)")?;
    within(theta_rival.values(), &[0.0, -1.0, -1.0, -1.0, -2.0, -2.0, -3.0], 1e-12, "theta(1,8,1)")?;
    check(theta_talmud.lex_cmp(&theta_rival, 1e-12) == Ordering::Less, || {
        "theta(1.5,7.5,1) is not lexicographically below theta(1,8,1)".into()
    })?;
    Ok(format!(
        "Talmud = lattice = (1.5, 7.5, 1), confirmed over {DEFAULT_TRIALS} samples; (1, 8, 1) refuted \
         (sample {trial} witness {:.3?}, and theta(1.5,7.5,1) <_L theta(1,8,1))",
        witness
    ))
}

fn two_user_rates() -> Outcome {
    let p = running();
    let prop = proportional(&p);
    let fair = mmf(&p);
    let got = [
        ps(&p, &prop).unwrap()[1],
        ps(&p, &fair).unwrap()[1],
        dfs(&p, &prop).unwrap()[1],
        dfs(&p, &fair).unwrap()[1],
    ];
    within(&got, &[0.444, 0.0, 0.555, 0.3846], 0.001, "PS2/PS2/DFS2/DFS2")?;
    Ok(format!("PS_2 = {:.4}/{:.4}, DFS_2 = {:.4}/{:.4}", got[0], got[1], got[2], got[3]))
}

fn four_step_route() -> Outcome {
    let start = Instant::now();
    let steps = mood_value_steps(&running());
    within(&steps.min_rights, &[0.0, 5.0, 0.0], 1e-9, "step 1")?;
    within(&[steps.reduced_estate], &[5.0], 1e-9, "step 2 estate")?;
    within(&steps.reduced_demands, &[3.0, 5.0, 2.0], 1e-9, "step 2 demands")?;
    within(&steps.reduced_allocation, &[1.5, 2.5, 1.0], 1e-9, "step 3")?;
    within(&steps.allocation.amounts, &[1.5, 7.5, 1.0], 1e-9, "step 4")?;
    let mut worst = 0.0f64;
    for id in 0..10_000 {
        let p = random_problem(4, id, 2, 10);
        let diff = max_abs_diff(&mood_value(&p).amounts, &mood_value_4step(&p).amounts);
        worst = worst.max(diff);
        check(diff <= 1e-9, || format!("instance {id}: routes differ by {diff:e} on {p:?}"))?;
    }
    let elapsed = start.elapsed();
    time_limit(elapsed, Duration::from_secs(30), "equivalence sweep")?;
    Ok(format!("intermediates exact; 10^4 random problems, max diff {worst:.1e}, {elapsed:.1?}"))
}

fn identities() -> Outcome {
    let tol = 1e-9;
    let (mut eq11, mut table2, mut scale, mut pf) = (0usize, 0usize, 0usize, 0usize);
    for id in 0..10_000u64 {
        let p = random_problem(5, id, 2, 10);
        let n = p.users();
        for rule in Rule::ALL {
            let x = rule.apply(&p).unwrap();
            let rates = ps(&p, &x).unwrap();
            for i in 0..n {
                let d = propensity_to_disrupt(&p, &x, Coalition::singleton(i).unwrap()).unwrap();
                if d.is_finite() && d > -1.0 {
                    let diff = (rates[i] - 1.0 / (d + 1.0)).abs();
                    check(diff <= tol, || format!("PS=1/(d+1) off by {diff:e}: {rule} user {i} of {p:?}"))?;
                    eq11 += 1;
                }
                let by_case = ps_by_case(&p, &x, i).unwrap();
                let diff = (by_case - rates[i]).abs();
                check(diff <= tol, || format!("case formula off by {diff:e}: {rule} user {i} of {p:?}"))?;
                table2 += 1;
            }
            let k = 10f64.powf(-3.0 + 6.0 * rng::unit(&mut stream(55, id)));
            let scaled = p.scaled(k).unwrap();
            let scaled_x = fairdiv::Allocation::new(x.amounts.iter().map(|a| a * k).collect(), None);
            let j = (jain_index(&p, &x).unwrap(), player_fairness_index(&p, &x).unwrap());
            let js = (jain_index(&scaled, &scaled_x).unwrap(), player_fairness_index(&scaled, &scaled_x).unwrap());
            check((j.0 - js.0).abs() <= tol && (j.1 - js.1).abs() <= tol, || {
                format!("scale {k}: indices {j:?} vs {js:?} for {rule} on {p:?}")
            })?;
            scale += 1;
        }
        let pf_mood = player_fairness_index(&p, &mood_value(&p)).unwrap();
        check((pf_mood - 1.0).abs() <= tol, || format!("PF(mood) = {pf_mood} on {p:?}"))?;
        pf += 1;
    }
    Ok(format!(
        "10^4 instances: PS=1/(d+1) x{eq11}, case formulas x{table2}, scale invariance x{scale}, PF(mood)=1 x{pf}"
    ))
}

/// Problem with one user split into two claims `d` and `c_i - d`.
fn split(p: &AllocationProblem, i: usize, fraction: f64) -> AllocationProblem {
    let mut demands: Vec<f64> = p.demands().to_vec();
    let c = demands.remove(i);
    demands.push(c * fraction);
    demands.push(c * (1.0 - fraction));
    AllocationProblem::new(demands, p.estate()).unwrap()
}

fn core_and_properties() -> Outcome {
    let mut failures = Vec::new();

    let mut core_ok = 0;
    for id in 0..10_000u64 {
        let p = random_problem(6, id, 2, 10);
        if core_membership(&p, &mood_value(&p)).unwrap() {
            core_ok += 1;
        } else {
            failures.push(format!("mood value outside the core for {p:?}"));
            break;
        }
    }

    // Equal treatment of equals: duplicate a random user's demand.
    let mut equals = 0;
    for id in 0..10_000u64 {
        let base = random_problem(61, id, 2, 9);
        let mut s = stream(62, id);
        let j = rng::index(&mut s, base.users());
        let mut demands = base.demands().to_vec();
        demands.push(demands[j]);
        let p = AllocationProblem::new(demands, base.estate()).unwrap();
        let x = mood_value(&p).amounts;
        if (x[j] - x[p.users() - 1]).abs() > 1e-12 {
            failures.push(format!("equal claims treated differently in {p:?}: {x:?}"));
            break;
        }
        equals += 1;
    }

    // Equal treatment of greedy claimants: estate at most the second largest claim.
    let mut greedy = 0;
    for id in 0..10_000u64 {
        let mut s = stream(63, id);
        let n = 2 + rng::index(&mut s, 9);
        let demands: Vec<f64> = (0..n).map(|_| 1.0 + 99.0 * rng::unit(&mut s)).collect();
        let mut sorted = demands.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let estate = sorted[1] * rng::unit(&mut s);
        let p = AllocationProblem::new(demands, estate).unwrap();
        let x = mood_value(&p).amounts;
        let shares: Vec<f64> = (0..n).filter(|&i| p.demands()[i] >= estate).map(|i| x[i]).collect();
        let spread = shares.iter().cloned().fold(f64::MIN, f64::max) - shares.iter().cloned().fold(f64::MAX, f64::min);
        if shares.len() < 2 || spread > 1e-12 {
            failures.push(format!("greedy claimants treated differently in {p:?}: {x:?}"));
            break;
        }
        greedy += 1;
    }

    // Split non-profitability.
    let mut profitable = 0;
    let mut first = None;
    let mut largest_gain = 0.0f64;
    for id in 0..1_000u64 {
        let p = random_problem(64, id, 2, 9);
        let mut s = stream(65, id);
        let i = rng::index(&mut s, p.users());
        let fraction = 0.001 + 0.998 * rng::unit(&mut s);
        let q = split(&p, i, fraction);
        let before = mood_value(&p).amounts[i];
        let after: f64 = mood_value(&q).amounts[q.users() - 2..].iter().sum();
        let gain = after - before;
        largest_gain = largest_gain.max(gain);
        if gain > 1e-9 {
            profitable += 1;
            first.get_or_insert_with(|| {
                format!("e.g. {:?}, E = {:.4}: user {i} gets {before:.4} whole, {after:.4} split", p.demands(), p.estate())
            });
        }
    }
    if profitable > 0 {
        failures.push(format!(
            "splitting paid off in {profitable}/1000 pairs (largest gain {largest_gain:.4}); {}",
            first.unwrap_or_default()
        ));
    }

    let summary = format!(
        "core {core_ok}/10^4 (n<=10, exhaustive), equal claims {equals}/10^4, greedy claimants {greedy}/10^4"
    );
    if failures.is_empty() {
        Ok(format!("{summary}, splitting never profitable in 10^3 pairs"))
    } else {
        Err(format!("{summary}; {}", failures.join("; ")))
    }
}

fn regime_limits() -> Outcome {
    let (mut all_gg, mut all_gm) = (0, 0);
    for id in 0..10_000u64 {
        let mut s = stream(7, id);
        let n = 2 + rng::index(&mut s, 9);
        let demands: Vec<f64> = (0..n).map(|_| 1.0 + 99.0 * rng::unit(&mut s)).collect();
        let smallest = demands.iter().cloned().fold(f64::MAX, f64::min);

        let p = AllocationProblem::new(demands.clone(), smallest * rng::unit(&mut s)).unwrap();
        if p.classify_all().iter().all(|c| *c == UserCase::Gg) {
            let equal = vec![p.estate() / n as f64; n];
            within(&mood_value(&p).amounts, &equal, 1e-9, "all-Gg mood vs equal split")?;
            within(&mmf(&p).amounts, &equal, 1e-9, "all-Gg mmf vs equal split")?;
            all_gg += 1;
        }

        let total: f64 = demands.iter().sum();
        let largest = demands.iter().cloned().fold(0.0, f64::max);
        // Gm for everyone: largest claim below E and E below total minus largest.
        if total - largest > largest {
            let estate = largest + (total - largest - largest) * rng::unit(&mut s);
            let q = AllocationProblem::new(demands, estate).unwrap();
            if q.classify_all().iter().all(|c| *c == UserCase::Gm) {
                within(&mood_value(&q).amounts, &proportional(&q).amounts, 1e-9, "all-Gm mood vs prop")?;
                all_gm += 1;
            }
        }
    }
    check(all_gg > 1000 && all_gm > 1000, || format!("too few regime instances: Gg {all_gg}, Gm {all_gm}"))?;
    Ok(format!("all-Gg: mood = mmf = E/n on {all_gg}; all-Gm: mood = prop on {all_gm}"))
}

fn index_mean(out: &SweepOutput, ratio: f64, rule: Rule, kind: IndexKind) -> f64 {
    out.indices
        .iter()
        .find(|r| r.rule == rule && r.index == kind && (r.ratio - ratio).abs() < 1e-9)
        .map(|r| r.mean)
        .expect("record present")
}

fn distance(out: &SweepOutput, ratio: f64, rule: Rule) -> f64 {
    out.distances
        .iter()
        .find(|r| r.rule == rule && (r.ratio - ratio).abs() < 1e-9)
        .map(|r| r.mean_l1_to_mood)
        .expect("record present")
}

fn simulation_trends() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    let three = run_sweep(&SweepConfig::new(uniform(), 3, 42)).map_err(|e| e.to_string())?;
    let low = &three.cases[0];
    let high = three.cases.last().unwrap();
    notes.push(format!("(a) Gg@5% = {:.3}, modal@95% = {}", low.frac_gg, high.modal_case()));
    if !(low.frac_gg > 0.9 && high.modal_case() == UserCase::Mm) {
        failures.push(format!("(a) Gg@5% = {:.3}, modal@95% = {:?}", low.frac_gg, high));
    }

    let four = run_sweep(&SweepConfig { ratios: vec![0.05, 0.95], ..SweepConfig::new(uniform(), 4, 42) })
        .map_err(|e| e.to_string())?;
    let (mmf_lo, prop_lo) = (distance(&four, 0.05, Rule::Mmf), distance(&four, 0.05, Rule::Proportional));
    let (mmf_hi, prop_hi) = (distance(&four, 0.95, Rule::Mmf), distance(&four, 0.95, Rule::Proportional));
    notes.push(format!(
        "(b) L1 to mood @5%: mmf {mmf_lo:.3} vs prop {prop_lo:.3}; @95%: mmf {mmf_hi:.3} vs prop {prop_hi:.3}"
    ));
    if !(mmf_lo < prop_lo && prop_hi < mmf_hi) {
        failures.push(notes.last().unwrap().clone());
    }

    for (name, dist) in [("uniform", uniform()), ("weibull", weibull())] {
        let five = run_sweep(&SweepConfig::new(dist, 5, 42)).map_err(|e| e.to_string())?;
        let base = index_mean(&five, 0.05, Rule::Proportional, IndexKind::PlayerFairness);
        let region: Vec<(f64, f64)> = SweepConfig::standard_ratios()
            .into_iter()
            .filter(|r| *r >= 0.4 - 1e-9)
            .map(|r| (r, index_mean(&five, r, Rule::Proportional, IndexKind::PlayerFairness)))
            .collect();
        let region_mean = region.iter().map(|(_, v)| v).sum::<f64>() / region.len() as f64;
        let below: Vec<String> = region
            .iter()
            .filter(|(_, v)| !(*v > 0.99 && *v > base))
            .map(|(r, v)| format!("{r:.2}:{v:.4}"))
            .collect();
        notes.push(format!(
            "(c) {name}: PF(prop)@5% = {base:.4}, min over ratios >= 0.4 = {:.4}, mean over them = {region_mean:.4}",
            region.iter().map(|(_, v)| *v).fold(f64::MAX, f64::min)
        ));
        if !below.is_empty() {
            failures.push(format!("(c) {name}: mean PF(prop) not above 0.99 at ratios {}", below.join(", ")));
        }
    }

    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(120) {
        failures.push(format!("sweeps took {elapsed:?}"));
    }
    if failures.is_empty() {
        Ok(format!("{}; {elapsed:.1?}", notes.join("; ")))
    } else {
        Err(format!("{} || {}", failures.join("; "), notes.join("; ")))
    }
}

fn oracle_agreement() -> Outcome {
    let mut worst_shapley = 0.0f64;
    for id in 0..5_000u64 {
        let p = random_problem(9, id, 1, 6);
        let diff = max_abs_diff(&shapley(&p).unwrap().amounts, &shapley_by_permutations(&p).unwrap().amounts);
        worst_shapley = worst_shapley.max(diff);
        check(diff <= 1e-9, || format!("Shapley routes differ by {diff:e} on {p:?}"))?;
    }
    let mut worst_step3 = 0.0f64;
    for id in 0..10_000u64 {
        let p = random_problem(91, id, 2, 10);
        let steps = mood_value_steps(&p);
        let m = p.rights_profile().mood;
        let analytic: Vec<f64> = steps.reduced_demands.iter().map(|c| m * c).collect();
        let diff = max_abs_diff(&steps.reduced_allocation, &analytic);
        worst_step3 = worst_step3.max(diff);
        check(diff <= 1e-9, || format!("step 3 differs from m c' by {diff:e} on {p:?}"))?;
    }
    Ok(format!(
        "Shapley vs permutations (n<=6, 5000 problems) max diff {worst_shapley:.1e}; step 3 = m c' (10^4) max diff {worst_step3:.1e}"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("reference allocations", reference_allocations),
        ("nucleolus of (3, 13, 2; 10)", nucleolus_of_running_problem),
        ("two-user satisfaction rates", two_user_rates),
        ("four-step route", four_step_route),
        ("identity suite", identities),
        ("core and axiomatic properties", core_and_properties),
        ("regime limits", regime_limits),
        ("simulation trends", simulation_trends),
        ("oracle agreement", oracle_agreement),
    ];
    let mut failed = 0;
    for (title, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {title}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
