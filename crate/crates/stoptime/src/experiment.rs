//! The property suite over fuzzed instances, plus the Monte Carlo law checks.
//!
//! Every exact check runs on its own instance, generated from stream `i` of
//! the seed, so the report does not depend on the number of threads. Rows are
//! ordered by instance, then by check.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use stoptime_core::prelude::*;

use crate::fixtures;
use crate::fuzz::{mutate_invalid, random_instance, Bounds, FuzzInstance};
use crate::rng::{stream, MC_STREAM_BASE};
use crate::sample::{empirical_delta, Sampler};

/// A deliberately broken conversion, used to check that the harness notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// The generalized inverse stops one grid step late wherever it can.
    LateInverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_samples: usize,
    pub n_instances: usize,
    pub bounds: Bounds,
    pub tv_tolerance: f64,
    pub fault: Option<Fault>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            n_samples: 100_000,
            n_instances: 200,
            bounds: Bounds::default(),
            tv_tolerance: 0.01,
            fault: None,
        }
    }
}

impl ExperimentConfig {
    pub fn is_valid(&self) -> bool {
        self.n_samples > 0 && self.n_instances > 0 && self.bounds.is_valid() && self.tv_tolerance > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub instance: String,
    pub check: &'static str,
    pub status: Status,
    pub witness: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckTally {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub n_instances: usize,
    pub n_samples: usize,
    pub tv_tolerance: f64,
    pub checks: BTreeMap<&'static str, CheckTally>,
    /// Total variation distance of each Monte Carlo check.
    pub monte_carlo: BTreeMap<&'static str, f64>,
    pub failures: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn rows_for<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.check == check)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["instance", "check", "status", "witness"]).expect("in-memory write");
        for r in &self.rows {
            w.write_record([r.instance.as_str(), r.check, r.status.as_str(), r.witness.as_str()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv of utf-8 fields")
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }
}

/// Outcome of one check: `Ok(())` or a witness.
type Outcome = Result<(), String>;

fn from_core<T>(r: Result<T, Error>) -> Result<T, String> {
    r.map_err(|e| format!("error: {e}"))
}

fn describe(space: &FilteredSpace, d: &Difference) -> String {
    format!(
        "w={} j={} left={} right={}",
        space.label(d.outcome),
        d.level,
        d.left,
        d.right
    )
}

fn same_law(space: &FilteredSpace, a: &StoppingTime, b: &StoppingTime) -> Outcome {
    match from_core(compare(space, a, b))? {
        None => Ok(()),
        Some(d) => Err(describe(space, &d)),
    }
}

fn all_equal(values: &[(&str, Rational)]) -> Outcome {
    let (first_name, first) = &values[0];
    for (name, v) in &values[1..] {
        if v != first {
            return Err(format!("{first_name}={first} {name}={v}"));
        }
    }
    Ok(())
}

fn inverse(config: &ExperimentConfig, space: &FilteredSpace, rho: &RandomizedSt) -> Result<MixedSt, Error> {
    let mut mu = mixed_of_randomized(space, rho)?;
    if config.fault == Some(Fault::LateInverse) {
        let last = space.last();
        for s in &mut mu.sections {
            let values: Vec<usize> = s.values().iter().map(|&v| (v + 1).min(last)).collect();
            *s = StepFunction::new(s.breaks().to_vec(), values).expect("same breaks").canonical();
        }
    }
    Ok(mu)
}

fn instance_valid(inst: &FuzzInstance) -> Outcome {
    let s = &inst.space;
    let reports = [
        ("pure", validate_pure(s, &inst.pure)),
        ("mixed", validate_mixed(s, &inst.mixed)),
        ("inverse", validate_mixed(s, &inst.inverse)),
        ("randomized", validate_randomized(s, &inst.randomized)),
        ("distribution", validate_distribution(s, &inst.distribution)),
        ("opponent_mixed", validate_mixed(s, &inst.opponent_mixed)),
        ("opponent_randomized", validate_randomized(s, &inst.opponent_randomized)),
        ("opponent_distribution", validate_distribution(s, &inst.opponent_distribution)),
        ("reward", validate_adapted(s, &inst.reward)),
    ];
    for (name, report) in reports {
        if !report.is_valid() {
            return Err(format!("{name}: {report}"));
        }
    }
    Ok(())
}

fn inverse_equivalent(config: &ExperimentConfig, inst: &FuzzInstance) -> Outcome {
    let s = &inst.space;
    let rho = &inst.randomized;
    let mu = from_core(inverse(config, s, rho))?;
    for o in 0..s.n_outcomes() {
        for j in 0..s.n_times() {
            let cdf = from_core(cdf_of_mixed(s, &mu, o, j))?;
            if cdf != rho.paths[o][j] {
                return Err(format!("w={} j={} cdf={} rho={}", s.label(o), j, cdf, rho.paths[o][j]));
            }
        }
    }
    same_law(s, &rho.clone().into(), &mu.into())
}

fn randomized_round_trip(inst: &FuzzInstance) -> Outcome {
    let s = &inst.space;
    let rho = from_core(randomized_of_distribution(s, &inst.distribution))?;
    let back = from_core(delta_of_randomized(s, &rho))?;
    same_law(s, &back.into(), &inst.distribution.clone().into())
}

/// Two randomized times with the same law have the same paths.
fn randomized_unique(inst: &FuzzInstance) -> Outcome {
    let s = &inst.space;
    let from_mixed = from_core(to_randomized(s, &inst.mixed.clone().into()))?;
    let from_law = from_core(randomized_of_distribution(s, &inst.distribution))?;
    for (name, other) in [("from_mixed", &from_mixed), ("from_law", &from_law)] {
        for o in 0..s.n_outcomes() {
            for j in 0..s.n_times() {
                if other.paths[o][j] != inst.randomized.paths[o][j] {
                    return Err(format!(
                        "{name}: w={} j={} {} vs {}",
                        s.label(o),
                        j,
                        other.paths[o][j],
                        inst.randomized.paths[o][j]
                    ));
                }
            }
        }
    }
    Ok(())
}

fn payoff_invariance(config: &ExperimentConfig, inst: &FuzzInstance) -> Outcome {
    let s = &inst.space;
    let problem = from_core(StoppingProblem::new(s.clone(), inst.reward.clone()))?;
    let mu = from_core(inverse(config, s, &inst.randomized))?;
    all_equal(&[
        ("mixed", from_core(problem.payoff_mixed(&inst.mixed))?),
        ("inverse", from_core(problem.payoff_mixed(&mu))?),
        ("randomized", from_core(problem.payoff_randomized(&inst.randomized))?),
        ("distribution", from_core(problem.payoff_distribution(&inst.distribution))?),
    ])
}

fn pure_payoff_invariance(inst: &FuzzInstance) -> Outcome {
    let s = &inst.space;
    let problem = from_core(StoppingProblem::new(s.clone(), inst.reward.clone()))?;
    let pure: StoppingTime = inst.pure.clone().into();
    all_equal(&[
        ("pure", from_core(problem.payoff_pure(&inst.pure))?),
        ("mixed", from_core(problem.payoff_mixed(&embed_pure(&inst.pure)))?),
        ("randomized", from_core(problem.payoff_randomized(&from_core(to_randomized(s, &pure))?))?),
        ("distribution", from_core(problem.payoff_distribution(&from_core(to_distribution(s, &pure))?))?),
    ])
}

fn lifted_equivalence(config: &ExperimentConfig, inst: &FuzzInstance) -> Outcome {
    let s = &inst.space;
    let lifted = from_core(lift(&inst.game, &inst.opponent_distribution))?;
    let ls = lifted.space();
    let mu = from_core(inverse(config, s, &inst.randomized))?;
    let candidates = [
        ("mixed", from_core(lifted.lift(s, &inst.mixed.clone().into()))?),
        ("inverse", from_core(lifted.lift(s, &mu.into()))?),
        ("distribution", from_core(lifted.lift(s, &inst.distribution.clone().into()))?),
    ];
    let lr: StoppingTime = from_core(lifted.lift_randomized(&inst.randomized))?.into();
    for (name, st) in candidates.iter().chain([("randomized", lr.clone())].iter()) {
        let report = st.validate(ls);
        if !report.is_valid() {
            return Err(format!("lifted {name}: {report}"));
        }
    }
    for (name, st) in &candidates {
        same_law(ls, st, &lr).map_err(|w| format!("{name}: {w}"))?;
    }
    Ok(())
}

fn game_routes(config: &ExperimentConfig, inst: &FuzzInstance) -> Outcome {
    let game = &inst.game;
    let mu = from_core(inverse(config, &inst.space, &inst.randomized))?;
    let symmetric = from_core(game_payoff_symmetric(game, &inst.mixed, &inst.opponent_mixed))?;
    let negated = from_core(game_payoff_symmetric(&game.negated(), &inst.mixed, &inst.opponent_mixed))?;
    if negated != -symmetric.clone() {
        return Err(format!("symmetric={symmetric} negated={negated}"));
    }
    let opp = &inst.opponent_distribution;
    all_equal(&[
        ("symmetric", symmetric),
        ("lift_mixed", from_core(game_payoff_via_lift(game, &inst.mixed.clone().into(), opp))?),
        ("lift_inverse", from_core(game_payoff_via_lift(game, &mu.into(), opp))?),
        ("lift_randomized", from_core(game_payoff_via_lift(game, &inst.randomized.clone().into(), opp))?),
        ("lift_distribution", from_core(game_payoff_via_lift(game, &inst.distribution.clone().into(), opp))?),
        (
            "p2view_mixed",
            from_core(game_payoff_player2_view(game, &inst.distribution, &inst.opponent_mixed.clone().into()))?,
        ),
        (
            "p2view_randomized",
            from_core(game_payoff_player2_view(game, &inst.distribution, &inst.opponent_randomized.clone().into()))?,
        ),
    ])
}

fn validators_agree(space: &FilteredSpace, mu: &MixedSt, expect_valid: bool) -> Outcome {
    let sectionwise = validate_mixed_sectionwise(space, mu);
    let product = validate_mixed_product(space, mu);
    if sectionwise.is_valid() != product.is_valid() {
        return Err(format!("sectionwise={} product={}", sectionwise.is_valid(), product.is_valid()));
    }
    if sectionwise.is_valid() != expect_valid {
        return Err(format!("expected valid={expect_valid}"));
    }
    Ok(())
}

/// Draws fresh instances from `rng` until one admits a measurability-breaking mutation.
fn invalid_case<R: Rng>(rng: &mut R, first: &FuzzInstance, bounds: &Bounds) -> Option<(FilteredSpace, MixedSt)> {
    if let Some(bad) = mutate_invalid(rng, &first.space, &first.mixed) {
        return Some((first.space.clone(), bad));
    }
    if bounds.max_outcomes < 2 || bounds.max_grid_points < 2 {
        return None;
    }
    for _ in 0..1000 {
        let inst = random_instance(rng, bounds);
        if let Some(bad) = mutate_invalid(rng, &inst.space, &inst.mixed) {
            return Some((inst.space, bad));
        }
    }
    None
}

fn row(instance: &str, check: &'static str, outcome: Outcome) -> Row {
    let (status, witness) = match outcome {
        Ok(()) => (Status::Pass, String::new()),
        Err(w) => (Status::Fail, w),
    };
    Row { instance: instance.to_owned(), check, status, witness }
}

fn instance_rows(config: &ExperimentConfig, id: usize) -> Vec<Row> {
    let mut rng = stream(config.seed, id as u64);
    let inst = random_instance(&mut rng, &config.bounds);
    let name = id.to_string();
    let mut rows = vec![row(&name, "instance_valid", instance_valid(&inst))];
    if rows[0].status == Status::Fail {
        return rows;
    }
    rows.push(row(&name, "inverse_equivalent", inverse_equivalent(config, &inst)));
    rows.push(row(&name, "randomized_round_trip", randomized_round_trip(&inst)));
    rows.push(row(&name, "randomized_unique", randomized_unique(&inst)));
    rows.push(row(&name, "payoff_invariance", payoff_invariance(config, &inst)));
    rows.push(row(&name, "pure_payoff_invariance", pure_payoff_invariance(&inst)));
    rows.push(row(&name, "lifted_equivalence", lifted_equivalence(config, &inst)));
    rows.push(row(&name, "game_routes", game_routes(config, &inst)));
    rows.push(row(&name, "validators_agree_valid", validators_agree(&inst.space, &inst.mixed, true)));
    if let Some((space, bad)) = invalid_case(&mut rng, &inst, &config.bounds) {
        rows.push(row(&name, "validators_agree_invalid", validators_agree(&space, &bad, false)));
    }
    rows
}

fn remark_check() -> Outcome {
    let s = fixtures::two_point_space(false);
    let uniform: StoppingTime = fixtures::uniform().into();
    same_law(&s, &fixtures::mu().into(), &uniform).map_err(|w| format!("mu: {w}"))?;
    same_law(&s, &fixtures::mu_tilde().into(), &uniform).map_err(|w| format!("mu_tilde: {w}"))?;
    if fixtures::mu().canonical() == fixtures::mu_tilde().canonical() {
        return Err("canonical forms coincide".into());
    }
    Ok(())
}

pub const MC_CHECKS: [&str; 3] = ["mc_mixed", "mc_randomized", "mc_distribution"];

/// Total variation distances of `n` draws of the fixture's mixed, randomized
/// and distribution forms from the uniform law, in [`MC_CHECKS`] order.
pub fn monte_carlo(seed: u64, n: usize) -> Vec<f64> {
    let s = fixtures::two_point_space(false);
    let targets: [StoppingTime; 3] = [fixtures::mu().into(), fixtures::rho().into(), fixtures::uniform().into()];
    targets
        .par_iter()
        .enumerate()
        .map(|(i, st)| {
            let mut rng = stream(seed, MC_STREAM_BASE + i as u64);
            let samples = Sampler::new(&s, st).expect("fixture is valid").draw_many(&mut rng, n);
            empirical_delta(&s, &samples, &fixtures::uniform()).expect("nonempty samples").tv
        })
        .collect()
}

pub fn run_experiment(config: &ExperimentConfig) -> ExperimentReport {
    assert!(config.is_valid(), "invalid experiment config");
    let per_instance: Vec<Vec<Row>> =
        (0..config.n_instances).into_par_iter().map(|id| instance_rows(config, id)).collect();
    let mut rows: Vec<Row> = per_instance.into_iter().flatten().collect();

    rows.push(row("fixture", "remark", remark_check()));
    let tvs = monte_carlo(config.seed, config.n_samples);
    let mut monte_carlo = BTreeMap::new();
    for (&check, tv) in MC_CHECKS.iter().zip(tvs) {
        let outcome = if tv <= config.tv_tolerance {
            Ok(())
        } else {
            let mut w = String::new();
            write!(w, "tv={tv:.6} tolerance={}", config.tv_tolerance).expect("write to string");
            Err(w)
        };
        rows.push(row("fixture", check, outcome));
        monte_carlo.insert(check, tv);
    }

    let mut checks: BTreeMap<&'static str, CheckTally> = BTreeMap::new();
    for r in &rows {
        let t = checks.entry(r.check).or_default();
        match r.status {
            Status::Pass => t.pass += 1,
            Status::Fail => t.fail += 1,
        }
    }
    let failures = checks.values().map(|t| t.fail).sum();
    let summary = Summary {
        seed: config.seed,
        n_instances: config.n_instances,
        n_samples: config.n_samples,
        tv_tolerance: config.tv_tolerance,
        checks,
        monte_carlo,
        failures,
        passed: failures == 0,
    };
    ExperimentReport { rows, summary }
}
