use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stoptime::experiment::{run_experiment, ExperimentConfig, Fault};
use stoptime::format::{
    parse_document, read_process, read_space, read_stopping_time, read_text, to_json, write_text, Document,
    FormatError, StopFile,
};
use stoptime::fuzz::Bounds;
use stoptime::rng::stream;
use stoptime::sample::{empirical_delta, SampleRecord, Sampler};
use stoptime_core::prelude::*;
use stoptime_core::rational::{format_rational, to_f64};

const SEED_VAR: &str = "STOPTIME_SEED";

/// Random stopping times on finite filtered spaces.
///
/// Exit status: 0 on success, 1 when a check fails, 2 on bad input.
#[derive(Parser)]
#[command(name = "stoptime", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a space, or a process or stopping time against a space.
    Validate {
        file: PathBuf,
        /// Required unless FILE is itself a space.
        #[arg(long)]
        space: Option<PathBuf>,
    },
    /// Convert a stopping time to another representation.
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long)]
        space: PathBuf,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether two stopping times have the same law.
    Equiv {
        #[arg(long)]
        space: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Expected reward of a stopping time.
    Payoff {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        reward: PathBuf,
        #[arg(long)]
        stop: PathBuf,
        /// Evaluate through every representation and require equal values.
        #[arg(long)]
        check_kuhn: bool,
    },
    /// Value of a zero-sum stopping game for a pair of strategies.
    Game {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        z: PathBuf,
        #[arg(long)]
        p1: PathBuf,
        #[arg(long)]
        p2: PathBuf,
        #[arg(long, value_enum, default_value_t = Route::Lift)]
        route: Route,
    },
    /// Monte Carlo draws of a stopping time.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        stop: PathBuf,
        #[arg(long)]
        space: PathBuf,
        /// Reference law for the total variation check; defaults to the exact law of STOP.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
        /// Write the individual draws here as CSV.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the property suite on random instances.
    Fuzz {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// OUTCOMES,GRID_POINTS,BREAKS[,DENOMINATOR]
        #[arg(long, value_parser = parse_bounds)]
        bounds: Option<Bounds>,
        /// Monte Carlo draws per check.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
        /// CSV report; standard output if absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// JSON summary.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Mixed,
    Randomized,
    Distribution,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Lift,
    Symmetric,
    Both,
    P2view,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    LateInverse,
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let mut b = Bounds::default();
    match parts.as_slice() {
        [o, g, k] => (b.max_outcomes, b.max_grid_points, b.max_breaks) = (*o, *g, *k),
        [o, g, k, d] => {
            (b.max_outcomes, b.max_grid_points, b.max_breaks) = (*o, *g, *k);
            b.max_denominator = u32::try_from(*d).map_err(|e| e.to_string())?;
        }
        _ => return Err("expected OUTCOMES,GRID_POINTS,BREAKS[,DENOMINATOR]".into()),
    }
    if !b.is_valid() {
        return Err("bounds must be at least 1".into());
    }
    Ok(b)
}

enum Failure {
    Check(String),
    Input(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::RouteMismatch { .. } => Failure::Check(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

/// The environment variable wins over `--seed`.
fn effective_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Input(format!("{SEED_VAR}={v:?} is not a 64-bit seed"))),
        Err(_) => Ok(flag),
    }
}

fn show(q: &Rational) -> String {
    format!("{} ({:.6})", format_rational(q), to_f64(q))
}

fn emit(output: Option<&Path>, text: &str) -> CliResult {
    match output {
        Some(p) => Ok(write_text(p, text)?),
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn report_violations(report: &Report) -> CliResult {
    if report.is_valid() {
        println!("valid");
        Ok(())
    } else {
        Err(Failure::Check(report.to_string()))
    }
}

fn validate(file: &Path, space: Option<&Path>) -> CliResult {
    let doc = parse_document(&read_text(file)?)?;
    if let Document::Space(s) = doc {
        s.into_space()?;
        println!("valid");
        return Ok(());
    }
    let space = read_space(space.ok_or_else(|| Failure::Input("--space is required for this file".into()))?)?;
    match doc {
        Document::Process(p) => report_violations(&validate_adapted(&space, &p.into_process(&space)?)),
        Document::Stop(st) => report_violations(&st.into_stopping_time(&space)?.validate(&space)),
        Document::Space(_) => unreachable!("handled above"),
    }
}

fn convert(to: Target, space: &Path, input: &Path, output: Option<&Path>) -> CliResult {
    let space = read_space(space)?;
    let st = read_stopping_time(input, &space)?;
    let out: StoppingTime = match to {
        Target::Mixed => to_mixed(&space, &st)?.into(),
        Target::Randomized => to_randomized(&space, &st)?.into(),
        Target::Distribution => to_distribution(&space, &st)?.into(),
    };
    emit(output, &to_json(&StopFile::from_stopping_time(&space, &out)))
}

fn equiv(space: &Path, a: &Path, b: &Path) -> CliResult {
    let space = read_space(space)?;
    let a = read_stopping_time(a, &space)?;
    let b = read_stopping_time(b, &space)?;
    match compare(&space, &a, &b)? {
        None => {
            println!("equivalent");
            Ok(())
        }
        Some(d) => Err(Failure::Check(format!(
            "not equivalent: outcome {}, t_{} = {}: mass {} vs {}",
            space.label(d.outcome),
            d.level,
            format_rational(&space.grid()[d.level]),
            format_rational(&d.left),
            format_rational(&d.right)
        ))),
    }
}

fn payoff(space: &Path, reward: &Path, stop: &Path, check_kuhn: bool) -> CliResult {
    let space = read_space(space)?;
    let reward = read_process(reward, &space)?;
    let st = read_stopping_time(stop, &space)?;
    let problem = StoppingProblem::new(space.clone(), reward)?;
    let value = problem.payoff(&st)?;
    println!("{}", show(&value));
    if !check_kuhn {
        return Ok(());
    }
    let mut routes = vec![
        ("mixed", problem.payoff_mixed(&to_mixed(&space, &st)?)?),
        ("randomized", problem.payoff_randomized(&to_randomized(&space, &st)?)?),
        ("distribution", problem.payoff_distribution(&to_distribution(&space, &st)?)?),
    ];
    if let StoppingTime::Pure(p) = &st {
        routes.insert(0, ("pure", problem.payoff_pure(p)?));
    }
    for (name, v) in &routes {
        println!("{name}: {}", show(v));
    }
    if routes.iter().all(|(_, v)| *v == value) {
        Ok(())
    } else {
        Err(Failure::Check("payoff routes disagree".into()))
    }
}

#[allow(clippy::too_many_arguments)]
fn game(space: &Path, x: &Path, y: &Path, z: &Path, p1: &Path, p2: &Path, route: Route) -> CliResult {
    let space = read_space(space)?;
    let (x, y, z) = (read_process(x, &space)?, read_process(y, &space)?, read_process(z, &space)?);
    let p1 = read_stopping_time(p1, &space)?;
    let p2 = read_stopping_time(p2, &space)?;
    let game = StoppingGame::new(space.clone(), x, y, z)?;
    let lift = || -> Result<Rational, Error> { game_payoff_via_lift(&game, &p1, &to_distribution(&space, &p2)?) };
    let symmetric =
        || -> Result<Rational, Error> { game_payoff_symmetric(&game, &to_mixed(&space, &p1)?, &to_mixed(&space, &p2)?) };
    match route {
        Route::Lift => println!("{}", show(&lift()?)),
        Route::Symmetric => println!("{}", show(&symmetric()?)),
        Route::P2view => println!("{}", show(&game_payoff_player2_view(&game, &to_distribution(&space, &p1)?, &p2)?)),
        Route::Both => {
            let (a, b) = (lift()?, symmetric()?);
            println!("lift: {}", show(&a));
            println!("symmetric: {}", show(&b));
            if a != b {
                return Err(Failure::Check("routes disagree".into()));
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sample(
    n: usize,
    seed: u64,
    stop: &Path,
    space: &Path,
    reference: Option<&Path>,
    tolerance: f64,
    output: Option<&Path>,
) -> CliResult {
    if n == 0 {
        return Err(Failure::Input("--n must be positive".into()));
    }
    let space = read_space(space)?;
    let st = read_stopping_time(stop, &space)?;
    let reference = match reference {
        Some(p) => match read_stopping_time(p, &space)? {
            StoppingTime::Distribution(d) => d,
            _ => return Err(Failure::Input("--ref must be a distribution stopping time".into())),
        },
        None => to_distribution(&space, &st)?,
    };
    let samples = Sampler::new(&space, &st)?.draw_many(&mut stream(seed, 0), n);
    if let Some(path) = output {
        write_text(path, &samples_csv(&space, &samples))?;
    }
    let e = empirical_delta(&space, &samples, &reference).map_err(|e| Failure::Input(e.to_string()))?;
    println!("outcome,index,frequency,reference");
    for (o, row) in e.freq.iter().enumerate() {
        for (j, f) in row.iter().enumerate() {
            println!("{},{},{:.6},{}", space.label(o), j, f, format_rational(&reference.mass[o][j]));
        }
    }
    println!("tv={:.6} n={} seed={}", e.tv, e.n, seed);
    if e.tv <= tolerance {
        Ok(())
    } else {
        Err(Failure::Check(format!("total variation {:.6} exceeds {tolerance}", e.tv)))
    }
}

fn samples_csv(space: &FilteredSpace, samples: &[SampleRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["replicate", "outcome", "index"]).expect("in-memory write");
    for s in samples {
        w.write_record([s.replicate.to_string(), space.label(s.outcome).to_string(), s.index.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 labels")
}

fn fuzz(config: ExperimentConfig, output: Option<&Path>, summary: Option<&Path>) -> CliResult {
    if !config.is_valid() {
        return Err(Failure::Input("instances, samples and tolerance must be positive".into()));
    }
    let report = run_experiment(&config);
    emit(output, &report.to_csv())?;
    if let Some(p) = summary {
        write_text(p, &format!("{}\n", report.summary_json()))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} check(s) failed", report.summary.failures)))
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Validate { file, space } => validate(&file, space.as_deref()),
        Command::Convert { to, space, input, output } => convert(to, &space, &input, output.as_deref()),
        Command::Equiv { space, a, b } => equiv(&space, &a, &b),
        Command::Payoff { space, reward, stop, check_kuhn } => payoff(&space, &reward, &stop, check_kuhn),
        Command::Game { space, x, y, z, p1, p2, route } => game(&space, &x, &y, &z, &p1, &p2, route),
        Command::Sample { n, seed, stop, space, reference, tolerance, output } => sample(
            n,
            effective_seed(seed)?,
            &stop,
            &space,
            reference.as_deref(),
            tolerance,
            output.as_deref(),
        ),
        Command::Fuzz { instances, seed, bounds, samples, tolerance, output, summary, inject_fault } => {
            let config = ExperimentConfig {
                seed: effective_seed(seed)?,
                n_samples: samples,
                n_instances: instances,
                bounds: bounds.unwrap_or_default(),
                tv_tolerance: tolerance,
                fault: inject_fault.map(|FaultArg::LateInverse| Fault::LateInverse),
            };
            fuzz(config, output.as_deref(), summary.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
