//! Subcommand implementations. Every report is pretty JSON with exact rationals.

use std::fs;
use std::path::Path;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;
use uncrossing::functions::{verify_skew_supermodular, FunctionError, FunctionOracle, VERIFY_LIMIT};
use uncrossing::game::{
    blue_always_x, blue_random, blue_return_larger_potential, play, replay, worst_case_blue, BlueChoice,
    BlueStrategy, GameConfig, GameError, GameState, NaiveRed, RedMove, RedStrategy, TraceRecord,
};
use uncrossing::ground::Family;
use uncrossing::lp::{calibrated_experiment, dual_feasible, random_suboptimal_start, LpError, DUAL_SOLVE_LIMIT};
use uncrossing::redstrategy::{paper_red_strategy, PaperRed};
use uncrossing::uncross::{objective, uncross_naive, uncross_strategic, UncrossRun};
use uncrossing::Rational;

use crate::format::{
    dual_records, family_ids, format_rational, ids, parse_rational, trace_entry, FormatError, Instance, InstanceFile,
    StateDump, TraceEntry, TraceFile, WeightedSet,
};
use crate::generate::{generate, GenError};
use crate::{Cli, Command, RedKind, UncrossMode};

/// Exit code and output of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_GENERATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error("{0}")]
    Usage(String),
    #[error("generation failed: {0}")]
    Generation(GenError),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Generation(GenError::Exhausted(_)) => EXIT_GENERATION,
            _ => EXIT_PARSE,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn done<T: Serialize>(code: i32, report: &T) -> Outcome {
    Outcome {
        code,
        stdout: to_json(report),
        stderr: String::new(),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn load(path: &Path) -> Result<Instance, CliError> {
    let text = read(path)?;
    let wrap = |source| CliError::Format {
        path: path.display().to_string(),
        source,
    };
    InstanceFile::parse(&text).and_then(|f| f.build()).map_err(wrap)
}

fn rational_arg(name: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|_| CliError::Usage(format!("--{name}: {s:?} is not an exact rational")))
}

pub fn run(cli: Cli) -> Outcome {
    let result = match cli.command {
        Command::Gen {
            n,
            family_size,
            kind,
            seed,
            out,
        } => cmd_gen(n, family_size, kind, seed, out.as_deref()),
        Command::VerifyFn { instance } => cmd_verify_fn(&instance),
        Command::Play {
            instance,
            red,
            blue,
            seed,
            cap,
            allow_none,
            trace,
            verbose,
        } => cmd_play(&PlayArgs {
            instance: &instance,
            red,
            blue: &blue,
            seed,
            cap,
            allow_none,
            trace: trace.as_deref(),
            verbose,
        }),
        Command::Uncross { instance, mode, scale } => cmd_uncross(&instance, mode, scale.as_deref()),
        Command::LpExperiment {
            instance,
            epsilon,
            trials,
            seed,
        } => cmd_lp_experiment(&instance, &epsilon, trials, seed),
        Command::Replay {
            instance,
            trace,
            allow_none,
        } => cmd_replay(&instance, &trace, allow_none),
    };
    result.unwrap_or_else(|e| Outcome {
        code: e.code(),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    })
}

pub fn cmd_gen(
    n: usize,
    family_size: usize,
    kind: crate::generate::Kind,
    seed: u64,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let file = generate(n, family_size, kind, seed).map_err(|e| match e {
        GenError::BadSize(_) => CliError::Usage(e.to_string()),
        e => CliError::Generation(e),
    })?;
    let text = file.to_json();
    match out {
        Some(path) => {
            write(path, &text)?;
            Ok(Outcome {
                code: EXIT_OK,
                stdout: String::new(),
                stderr: String::new(),
            })
        }
        None => Ok(Outcome {
            code: EXIT_OK,
            stdout: text,
            stderr: String::new(),
        }),
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    result: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rhs: Option<String>,
}

pub fn cmd_verify_fn(path: &Path) -> Result<Outcome, CliError> {
    let inst = load(path)?;
    match verify_skew_supermodular(&inst.f) {
        Ok(None) => Ok(done(
            EXIT_OK,
            &VerifyReport {
                result: "ok",
                x: None,
                y: None,
                lhs: None,
                rhs: None,
            },
        )),
        Ok(Some(v)) => Ok(done(
            EXIT_PROPERTY,
            &VerifyReport {
                result: "violation",
                x: Some(ids(&v.x)),
                y: Some(ids(&v.y)),
                lhs: Some(format_rational(&v.lhs)),
                rhs: Some(format_rational(&v.rhs)),
            },
        )),
        Err(FunctionError::TooLarge(n)) => Err(CliError::Usage(format!(
            "exhaustive verification needs |V| <= {VERIFY_LIMIT}, got {n}"
        ))),
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

/// Either Red strategy, recording the winning strategy's state before each move.
#[derive(Debug, Clone)]
enum Red {
    Paper(Box<PaperRed>),
    Naive(NaiveRed),
}

#[derive(Debug, Clone)]
struct Recording {
    red: Red,
    snapshots: Vec<Option<StateDump>>,
}

impl RedStrategy for Recording {
    fn name(&self) -> &'static str {
        match &self.red {
            Red::Paper(r) => r.name(),
            Red::Naive(r) => r.name(),
        }
    }

    fn next_move(&mut self, state: &GameState, f: &FunctionOracle) -> Result<RedMove, GameError> {
        let mv = match &mut self.red {
            Red::Paper(r) => r.next_move(state, f)?,
            Red::Naive(r) => r.next_move(state, f)?,
        };
        self.snapshots.truncate(state.trace.len());
        self.snapshots.push(match &self.red {
            Red::Paper(r) => r.snapshot().map(StateDump::from),
            Red::Naive(_) => None,
        });
        Ok(mv)
    }

    fn observe(&mut self, mv: &RedMove, blue: BlueChoice, after: &Family) -> Result<(), GameError> {
        match &mut self.red {
            Red::Paper(r) => r.observe(mv, blue, after),
            Red::Naive(r) => r.observe(mv, blue, after),
        }
    }

    fn state_key(&self) -> String {
        match &self.red {
            Red::Paper(r) => r.state_key(),
            Red::Naive(r) => r.state_key(),
        }
    }
}

enum BlueKind {
    Random(u64),
    MaxPot,
    AlwaysX,
    Exhaustive,
}

fn parse_blue(s: &str, default_seed: u64) -> Result<BlueKind, CliError> {
    match s {
        "random" => Ok(BlueKind::Random(default_seed)),
        "maxpot" => Ok(BlueKind::MaxPot),
        "alwaysx" => Ok(BlueKind::AlwaysX),
        "exhaustive" => Ok(BlueKind::Exhaustive),
        _ => s
            .strip_prefix("random:")
            .and_then(|seed| seed.parse().ok())
            .map(BlueKind::Random)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "--blue: {s:?} is not one of random, random:SEED, maxpot, alwaysx, exhaustive"
                ))
            }),
    }
}

pub struct PlayArgs<'a> {
    pub instance: &'a Path,
    pub red: RedKind,
    pub blue: &'a str,
    pub seed: u64,
    pub cap: Option<u64>,
    pub allow_none: bool,
    pub trace: Option<&'a Path>,
    pub verbose: bool,
}

#[derive(Debug, Serialize)]
struct PlayReport {
    red: String,
    blue: String,
    allow_none: bool,
    ground_set_size: usize,
    initial_family_size: usize,
    won: bool,
    iterations: u64,
    oracle_calls: u64,
    /// `8·n³·|F0|`
    bound: u64,
    within_bound: bool,
    /// `iterations / (n³·|F0|)`
    constant: String,
    final_family: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    positions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<String>,
    /// Only on failure without `--trace`.
    #[serde(skip_serializing_if = "Option::is_none")]
    failure_trace: Option<Vec<TraceEntry>>,
}

fn entries(trace: &[TraceRecord], snapshots: Option<&[Option<StateDump>]>) -> Vec<TraceEntry> {
    trace
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let mut e = trace_entry(rec);
            e.state = snapshots.and_then(|s| s.get(i).cloned().flatten());
            e
        })
        .collect()
}

fn error_trace(e: &GameError) -> &[TraceRecord] {
    match e {
        GameError::Aborted { trace, .. } | GameError::RedLoses { trace } => trace,
        _ => &[],
    }
}

pub fn cmd_play(args: &PlayArgs) -> Result<Outcome, CliError> {
    let inst = load(args.instance)?;
    let blue_kind = parse_blue(args.blue, args.seed)?;
    let f0 = inst.family.deduplicated();
    let n = inst.ground.size() as u64;
    let m = f0.len() as u64;
    let bound = 8 * n.pow(3) * m;
    let cap = args.cap.unwrap_or(bound).max(1);
    let config = GameConfig {
        allow_none: args.allow_none,
    };
    let mut red = Recording {
        red: match args.red {
            RedKind::Paper => Red::Paper(Box::new(paper_red_strategy())),
            RedKind::Naive => Red::Naive(NaiveRed),
        },
        snapshots: Vec::new(),
    };
    let calls_before = inst.f.eval_count();
    let mut positions = None;
    let result: Result<(bool, u64, Family, Vec<TraceRecord>), GameError> = match blue_kind {
        BlueKind::Exhaustive => worst_case_blue(&f0, &inst.f, &red, cap, config).and_then(|wc| {
            positions = Some(wc.positions);
            let end = replay(&f0, &inst.f, &wc.witness, config)?;
            Ok((true, wc.max_iterations, end.final_family(), wc.witness))
        }),
        other => {
            let mut blue: Box<dyn BlueStrategy> = match other {
                BlueKind::Random(seed) => Box::new(blue_random(seed, args.allow_none)),
                BlueKind::MaxPot => Box::new(blue_return_larger_potential()),
                _ => Box::new(blue_always_x()),
            };
            play(&f0, &inst.f, &mut red, blue.as_mut(), cap, config)
                .map(|o| (o.won, o.iterations, o.final_family, o.trace))
        }
    };
    let oracle_calls = inst.f.eval_count() - calls_before;
    let (won, iterations, final_family, trace, error) = match result {
        Ok((won, it, fam, trace)) => (won, it, family_ids(&fam), trace, None),
        Err(GameError::TooLarge { n, m }) => {
            return Err(CliError::Usage(format!(
                "exhaustive Blue needs |V| <= 6 and |F0| <= 5, got |V|={n}, |F0|={m}"
            )))
        }
        Err(e) => {
            let trace = error_trace(&e).to_vec();
            let msg = e.to_string();
            (false, trace.len() as u64, Vec::new(), trace, Some(msg))
        }
    };
    // exhaustive witnesses are not recorded move by move
    let snapshots = (args.verbose && positions.is_none()).then_some(red.snapshots.as_slice());
    let trace_entries = entries(&trace, snapshots);
    if let Some(path) = args.trace {
        write(path, &TraceFile { records: trace_entries.clone() }.to_json())?;
    }
    let denom = n.pow(3) * m;
    let constant = if denom == 0 {
        Rational::zero()
    } else {
        Rational::new(iterations.into(), denom.into())
    };
    let report = PlayReport {
        red: red.name().to_string(),
        blue: args.blue.to_string(),
        allow_none: args.allow_none,
        ground_set_size: n as usize,
        initial_family_size: m as usize,
        won,
        iterations,
        oracle_calls,
        bound,
        within_bound: iterations <= bound,
        constant: format_rational(&constant),
        final_family,
        positions,
        error: error.clone(),
        trace: args.trace.map(|p| p.display().to_string()),
        failure_trace: (!won && args.trace.is_none()).then_some(trace_entries),
    };
    let code = if won { EXIT_OK } else { EXIT_PROPERTY };
    let mut out = done(code, &report);
    if let Some(msg) = error {
        out.stderr = format!("error: {msg}\n");
    } else if !won {
        out.stderr = format!("error: Red did not win within {cap} iterations\n");
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct StepReport {
    x: Vec<usize>,
    y: Vec<usize>,
    pair_choice: &'static str,
    alpha: String,
    blue_equivalent: &'static str,
}

#[derive(Debug, Serialize)]
struct UncrossReport {
    mode: &'static str,
    scale: String,
    steps: usize,
    objective_before: String,
    objective_after: String,
    laminar: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    potential_bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feasible_before: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feasible_after: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
    records: Vec<StepReport>,
    dual: Vec<WeightedSet>,
}

pub fn cmd_uncross(path: &Path, mode: UncrossMode, scale: Option<&str>) -> Result<Outcome, CliError> {
    let inst = load(path)?;
    let scale = match scale {
        Some(s) => rational_arg("scale", s)?,
        None => Rational::one(),
    };
    if scale <= Rational::zero() {
        return Err(CliError::Usage("--scale must be positive".into()));
    }
    let lam = inst
        .dual
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("{}: instance has no dual", path.display())))?
        .scaled(&scale);
    let feasible_before = inst.lp.as_ref().map(|lp| dual_feasible(lp, &lam).is_none());
    let mut warnings = Vec::new();
    if feasible_before == Some(false) {
        warnings.push("the dual violates an edge constraint of the lp section".to_string());
    }
    let (run, potential_bound): (Result<UncrossRun, _>, Option<Rational>) = match mode {
        UncrossMode::Strategic => (uncross_strategic(&lam, &inst.f).map(|r| r.run), None),
        UncrossMode::Naive => match uncross_naive(&lam, &inst.f) {
            Ok(r) => (Ok(r.run), Some(r.initial_potential)),
            Err(e) => (Err(e), None),
        },
    };
    let run = match run {
        Ok(run) => run,
        Err(e) => {
            return Ok(Outcome {
                code: EXIT_PROPERTY,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            })
        }
    };
    let feasible_after = inst.lp.as_ref().map(|lp| dual_feasible(lp, &run.result).is_none());
    let report = UncrossReport {
        mode: match mode {
            UncrossMode::Naive => "naive",
            UncrossMode::Strategic => "strategic",
        },
        scale: format_rational(&scale),
        steps: run.steps(),
        objective_before: format_rational(&objective(&lam, &inst.f)),
        objective_after: format_rational(&objective(&run.result, &inst.f)),
        laminar: run.result.is_laminar(),
        potential_bound: potential_bound.map(|p| format_rational(&p)),
        feasible_before,
        feasible_after,
        warnings: warnings.clone(),
        records: run
            .records
            .iter()
            .map(|r| StepReport {
                x: ids(&r.x),
                y: ids(&r.y),
                pair_choice: r.pair.name(),
                alpha: format_rational(&r.alpha),
                blue_equivalent: r.blue_equivalent.name(),
            })
            .collect(),
        dual: dual_records(&run.result),
    };
    let mut out = done(EXIT_OK, &report);
    out.stderr = warnings.iter().map(|w| format!("warning: {w}\n")).collect();
    Ok(out)
}

#[derive(Debug, Serialize)]
struct TrialReport {
    trial: usize,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective_start: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective_optimal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective_star: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_bound: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon_prime: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    star_laminar: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    star_feasible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chain_checks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chain_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_ok: Option<bool>,
}

impl TrialReport {
    fn bare(trial: usize, status: &'static str, error: Option<String>) -> Self {
        TrialReport {
            trial,
            status,
            error,
            objective_start: None,
            objective_optimal: None,
            objective_star: None,
            n_bound: None,
            epsilon_prime: None,
            t: None,
            distance: None,
            steps: None,
            star_laminar: None,
            star_feasible: None,
            chain_checks: None,
            chain_holds: None,
            alpha_ok: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct ExperimentReport {
    epsilon: String,
    trials: usize,
    seed: u64,
    passed: usize,
    failed: usize,
    nothing_to_improve: usize,
    n_choice: &'static str,
    results: Vec<TrialReport>,
}

fn trial(inst: &Instance, epsilon: &Rational, seed: u64, index: usize) -> TrialReport {
    let lp = inst.lp.as_ref().expect("checked by caller");
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
    let start = match random_suboptimal_start(lp, &mut rng) {
        Ok(Some(s)) => s,
        Ok(None) => return TrialReport::bare(index, "nothing_to_improve", None),
        Err(e) => return TrialReport::bare(index, "failed", Some(e.to_string())),
    };
    match calibrated_experiment(lp, &start, epsilon) {
        Ok(r) => TrialReport {
            trial: index,
            status: if r.passed() { "passed" } else { "failed" },
            error: None,
            objective_start: Some(format_rational(&r.objective_lambda)),
            objective_optimal: Some(format_rational(&r.objective_optimal)),
            objective_star: Some(format_rational(&r.objective_star)),
            n_bound: Some(r.config.n_bound),
            epsilon_prime: Some(format_rational(&r.config.epsilon_prime)),
            t: Some(format_rational(&r.t)),
            distance: Some(format_rational(&r.distance)),
            steps: Some(r.steps),
            star_laminar: Some(r.star_laminar),
            star_feasible: Some(r.star_feasible),
            chain_checks: Some(r.checks.len()),
            chain_holds: Some(r.checks.iter().all(|c| c.chain_holds)),
            alpha_ok: Some(r.checks.iter().all(|c| c.alpha_ok)),
        },
        Err(LpError::NothingToImprove) => TrialReport::bare(index, "nothing_to_improve", None),
        Err(e) => TrialReport::bare(index, "failed", Some(e.to_string())),
    }
}

pub fn cmd_lp_experiment(path: &Path, epsilon: &str, trials: usize, seed: u64) -> Result<Outcome, CliError> {
    let inst = load(path)?;
    let epsilon = rational_arg("epsilon", epsilon)?;
    if epsilon <= Rational::zero() {
        return Err(CliError::Usage("--epsilon must be positive".into()));
    }
    if inst.lp.is_none() {
        return Err(CliError::Usage(format!("{}: instance has no lp section", path.display())));
    }
    if inst.ground.size() > DUAL_SOLVE_LIMIT {
        return Err(CliError::Usage(format!(
            "lp experiments need |V| <= {DUAL_SOLVE_LIMIT}, got {}",
            inst.ground.size()
        )));
    }
    let results: Vec<TrialReport> = (0..trials).map(|i| trial(&inst, &epsilon, seed, i)).collect();
    let count = |s: &str| results.iter().filter(|r| r.status == s).count();
    let report = ExperimentReport {
        epsilon: format_rational(&epsilon),
        trials,
        seed,
        passed: count("passed"),
        failed: count("failed"),
        nothing_to_improve: count("nothing_to_improve"),
        n_choice: "measured: twice the probe run's step count, doubled until the run fits",
        results,
    };
    let code = if report.failed == 0 { EXIT_OK } else { EXIT_PROPERTY };
    Ok(done(code, &report))
}

#[derive(Debug, Serialize)]
struct ReplayReport {
    iterations: u64,
    laminar: bool,
    final_family: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn cmd_replay(instance: &Path, trace_path: &Path, allow_none: bool) -> Result<Outcome, CliError> {
    let inst = load(instance)?;
    let text = read(trace_path)?;
    let records = TraceFile::parse(&text)
        .and_then(|t| t.to_records(inst.ground))
        .map_err(|source| CliError::Format {
            path: trace_path.display().to_string(),
            source,
        })?;
    let f0 = inst.family.deduplicated();
    match replay(&f0, &inst.f, &records, GameConfig { allow_none }) {
        Ok(state) => Ok(done(
            EXIT_OK,
            &ReplayReport {
                iterations: state.iteration,
                laminar: state.family.is_laminar(),
                final_family: family_ids(&state.final_family()),
                error: None,
            },
        )),
        Err(e) => {
            let mut out = done(
                EXIT_PROPERTY,
                &ReplayReport {
                    iterations: error_trace(&e).len() as u64,
                    laminar: false,
                    final_family: Vec::new(),
                    error: Some(e.to_string()),
                },
            );
            out.stderr = format!("error: {e}\n");
            Ok(out)
        }
    }
}
