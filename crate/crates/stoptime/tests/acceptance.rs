//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use stoptime::experiment::{monte_carlo, run_experiment, ExperimentConfig, ExperimentReport, Status, MC_CHECKS};
use stoptime::fixtures;
use stoptime_core::prelude::*;

type Verdict = Result<String, String>;

fn remark() -> Verdict {
    let s = fixtures::two_point_space(false);
    let (mu, mu_tilde) = (fixtures::mu(), fixtures::mu_tilde());
    let uniform = fixtures::uniform();
    let d = delta_of_mixed(&s, &mu).map_err(|e| e.to_string())?;
    let dt = delta_of_mixed(&s, &mu_tilde).map_err(|e| e.to_string())?;
    if d != uniform || dt != uniform {
        return Err(format!("laws {:?} / {:?}", d.mass, dt.mass));
    }
    if !equivalent(&s, &mu.clone().into(), &mu_tilde.clone().into()).map_err(|e| e.to_string())? {
        return Err("not equivalent".into());
    }
    if mu.canonical() == mu_tilde.canonical() {
        return Err("canonical forms coincide".into());
    }
    Ok("both laws uniform 1/4, equivalent, canonical forms differ".into())
}

/// Every row of the named checks passed, and each check has `expected` rows.
fn suite(report: &ExperimentReport, checks: &[&str], expected: usize) -> Verdict {
    let mut notes = Vec::new();
    for &check in checks {
        let rows: Vec<_> = report.rows_for(check).collect();
        if let Some(bad) = rows.iter().find(|r| r.status == Status::Fail) {
            return Err(format!("{check} failed on instance {}: {}", bad.instance, bad.witness));
        }
        if rows.len() != expected {
            return Err(format!("{check}: {} rows, expected {expected}", rows.len()));
        }
        notes.push(format!("{check} {}/{expected}", rows.len()));
    }
    Ok(notes.join(", "))
}

fn monte_carlo_check(seed: u64, n: usize, tolerance: f64) -> Verdict {
    let start = Instant::now();
    let tvs = monte_carlo(seed, n);
    let elapsed = start.elapsed();
    if monte_carlo(seed, n) != tvs {
        return Err("not deterministic".into());
    }
    let shown: Vec<String> = MC_CHECKS.iter().zip(&tvs).map(|(c, tv)| format!("{c} tv={tv:.5}")).collect();
    if let Some((c, tv)) = MC_CHECKS.iter().zip(&tvs).find(|(_, tv)| **tv > tolerance) {
        return Err(format!("{c} tv={tv} exceeds {tolerance}"));
    }
    if elapsed > Duration::from_secs(5) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{}, {:.2}s", shown.join(", "), elapsed.as_secs_f64()))
}

fn fuzz_csv(threads: Option<&str>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stoptime"));
    cmd.args(["fuzz", "--instances", "200", "--seed", "7"]).env_remove("STOPTIME_SEED");
    match threads {
        Some(t) => cmd.env("RAYON_NUM_THREADS", t),
        None => cmd.env_remove("RAYON_NUM_THREADS"),
    };
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("fuzz exited with {:?}", out.status.code()));
    }
    Ok(out.stdout)
}

fn determinism() -> Verdict {
    let first = fuzz_csv(None)?;
    for threads in [None, Some("1"), Some("3"), Some("8")] {
        if fuzz_csv(threads)? != first {
            return Err(format!("report differs with RAYON_NUM_THREADS={threads:?}"));
        }
    }
    Ok(format!("{} identical bytes over 5 runs, 1/3/8/default threads", first.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let config = ExperimentConfig::default();
    let report = run_experiment(&config);
    let n = config.n_instances;

    let criteria: Vec<(&str, Verdict)> = vec![
        ("1 two-point example", remark()),
        ("2 generalized inverse", suite(&report, &["instance_valid", "inverse_equivalent"], n)),
        ("3 round trip and uniqueness", suite(&report, &["randomized_round_trip", "randomized_unique"], n)),
        ("4 payoff routes", suite(&report, &["payoff_invariance", "pure_payoff_invariance"], n)),
        ("5 game routes and lifting", suite(&report, &["game_routes", "lifted_equivalence"], n)),
        ("6 monte carlo law", monte_carlo_check(config.seed, config.n_samples, config.tv_tolerance)),
        ("7 validator agreement", suite(&report, &["validators_agree_valid", "validators_agree_invalid"], n)),
        ("8 determinism", determinism()),
    ];

    let mut failed = 0;
    for (name, verdict) in &criteria {
        match verdict {
            Ok(note) => println!("PASS criterion {name}: {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
