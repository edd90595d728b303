//! The `fictplay` command line.
//!
//! Exit codes: 0 on success, 1 on input errors (bad flags, unreadable or
//! malformed files, invalid profiles), 2 when a verification fails (not a
//! potential game, no rate certificate, bound violated).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fictplay::batch::{run_batch, write_batch_summary, BatchConfig};
use fictplay::io::{equilibria_json, event_log_json, trajectory_csv, CertificateJson, GameFile};
use fictplay::potential::{max_cycle_violation, sample_potential_game_with};
use fictplay::rng::{substream, Stream};
use fictplay::{
    check_exact_potential, enumerate_equilibria, extract_potential, rate_certificate, simulate_fp,
    verify_bound, Error, FpOptions, Metric, PotentialGame, Tolerances, TrajectoryStatus, XProfile,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Sample points per trajectory segment in CSV output.
const CSV_SAMPLES: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "fictplay", version, about = "Fictitious play in finite potential games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample random potential games and write them as JSON files.
    Gen(GenArgs),
    /// Verify a stored potential, or extract one.
    PotentialCheck(GameArgs),
    /// Enumerate and classify the Nash equilibria of a game.
    Equilibria(GameArgs),
    /// Simulate fictitious play; writes a trajectory CSV and an event log.
    Simulate(RunArgs),
    /// Simulate, then compute and verify the convergence-rate certificate.
    Rate(RunArgs),
    /// Run the seeded experiment over many games and initial conditions.
    Batch(BatchArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Verification tolerance: potential identity, equilibrium gain and rate bound.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Output directory. Without it results go to standard output where possible.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Action counts, e.g. `2,3`.
    #[arg(long, value_delimiter = ',', required = true)]
    actions: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct GameArgs {
    #[arg(long)]
    game: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    game: PathBuf,
    /// Initial reduced profile, player by player, e.g. `0.4,0.7`.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    x0: Vec<f64>,
    #[arg(long, default_value_t = 50.0)]
    horizon: f64,
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BatchArgs {
    /// A single shape for every game. Defaults to cycling through
    /// 2x2, 2x3, 3x2, 3x3 and 2x2x2.
    #[arg(long, value_delimiter = ',')]
    actions: Option<Vec<usize>>,
    /// Number of games.
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    n_inits: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 50.0)]
    horizon: f64,
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
    /// Worker threads; all available processors by default.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    common: Common,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn verify(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VERIFY,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotPotentialGame { .. } => Self::verify(e.to_string()),
            _ => Self::input(e.to_string()),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::PotentialCheck(a) => potential_check(a),
        Command::Equilibria(a) => equilibria(a),
        Command::Simulate(a) => simulate(a),
        Command::Rate(a) => rate(a),
        Command::Batch(a) => batch(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn tolerances(tol: f64) -> Result<Tolerances, Failure> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::input(format!("--tol must be positive, got {tol}")));
    }
    Ok(Tolerances {
        potential: tol,
        equilibrium: tol,
        ..Tolerances::default()
    })
}

fn check_horizon(horizon: f64) -> Result<(), Failure> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(Failure::input(format!("--horizon must be positive, got {horizon}")))
    }
}

fn read_game(path: &Path, tol: &Tolerances) -> Result<(GameFile, PotentialGame), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let file = GameFile::from_json(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let pg = file.to_potential_game(tol)?;
    Ok((file, pg))
}

/// Writes `content` to `out/name`, or to standard output when no directory
/// is given.
fn emit(out: Option<&Path>, name: &str, content: &str) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(name);
            fs::write(&path, content)
                .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn gen(a: GenArgs) -> CmdResult {
    if a.actions.is_empty() || a.actions.contains(&0) {
        return Err(Failure::input("--actions needs positive counts"));
    }
    let out = a.common.out.unwrap_or_else(|| PathBuf::from("."));
    for i in 0..a.n {
        let pg = sample_potential_game_with(&a.actions, &mut substream(a.seed, Stream::Games, i as u64))?;
        let json = GameFile::from_potential_game(&pg).to_json();
        emit(Some(&out), &format!("game_{:04}.json", i + 1), &json)?;
    }
    eprintln!("wrote {} game(s) to {}", a.n, out.display());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct PotentialReport {
    ok: bool,
    source: &'static str,
    max_violation: f64,
    max_cycle_violation: f64,
    potential: Option<Vec<f64>>,
}

fn potential_check(a: GameArgs) -> CmdResult {
    let tol = tolerances(a.common.tol)?;
    let text = fs::read_to_string(&a.game)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", a.game.display())))?;
    let file = GameFile::from_json(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", a.game.display())))?;
    let game = file.to_game()?;
    let cycle = max_cycle_violation(&game);
    let report = match &file.potential {
        Some(p) => {
            let check = check_exact_potential(&game, p, tol.potential)?;
            PotentialReport {
                ok: check.ok,
                source: "stored",
                max_violation: check.max_violation,
                max_cycle_violation: cycle,
                potential: Some(p.clone()),
            }
        }
        None => match extract_potential(&game, tol.potential) {
            Ok(pg) => PotentialReport {
                ok: true,
                source: "extracted",
                max_violation: 0.0,
                max_cycle_violation: cycle,
                potential: Some(pg.potential().to_vec()),
            },
            Err(Error::NotPotentialGame { max_violation }) => PotentialReport {
                ok: false,
                source: "extracted",
                max_violation,
                max_cycle_violation: cycle,
                potential: None,
            },
            Err(e) => return Err(e.into()),
        },
    };
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    emit(a.common.out.as_deref(), "potential.json", &json)?;
    if report.ok {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "not an exact potential game: largest violation {:e}",
            report.max_violation
        );
        Ok(EXIT_VERIFY)
    }
}

fn equilibria(a: GameArgs) -> CmdResult {
    let tol = tolerances(a.common.tol)?;
    let (_, pg) = read_game(&a.game, &tol)?;
    let eqs = enumerate_equilibria(&pg, &tol)?;
    emit(a.common.out.as_deref(), "equilibria.json", &equilibria_json(&eqs))?;
    Ok(EXIT_OK)
}

fn prepare_run(a: &RunArgs) -> Result<(PotentialGame, XProfile, FpOptions), Failure> {
    check_horizon(a.horizon)?;
    let tol = tolerances(a.common.tol)?;
    let (_, pg) = read_game(&a.game, &tol)?;
    let x0 = XProfile::from_flat(pg.action_counts(), &a.x0, tol.polytope)?;
    let opts = FpOptions {
        horizon: a.horizon,
        tol,
        ..FpOptions::default()
    };
    Ok((pg, x0, opts))
}

fn simulate(a: RunArgs) -> CmdResult {
    let (pg, x0, opts) = prepare_run(&a)?;
    let traj = simulate_fp(&pg, &x0, &opts)?;
    let eqs = enumerate_equilibria(&pg, &opts.tol)?;
    let csv = trajectory_csv(&pg, &traj, &eqs, a.metric, CSV_SAMPLES)?;
    let out = a.common.out.unwrap_or_else(|| PathBuf::from("."));
    emit(Some(&out), "trajectory.csv", &csv)?;
    emit(Some(&out), "events.json", &event_log_json(&traj))?;
    eprintln!(
        "{:?}: {} segment(s), {} switch(es), end time {}",
        traj.status,
        traj.segments.len(),
        traj.events.len(),
        traj.end_time
    );
    Ok(EXIT_OK)
}

fn rate(a: RunArgs) -> CmdResult {
    let (pg, x0, opts) = prepare_run(&a)?;
    let traj = simulate_fp(&pg, &x0, &opts)?;
    let (cert, bound) = if traj.status == TrajectoryStatus::Converged {
        let cert = rate_certificate(&traj, &pg, a.metric)?;
        let eqs = enumerate_equilibria(&pg, &opts.tol)?;
        let bound = verify_bound(&traj, &cert, &eqs, a.common.tol)?;
        (Some(cert), Some(bound))
    } else {
        (None, None)
    };
    let doc = CertificateJson::new(traj.status, cert.as_ref(), bound, a.metric);
    emit(a.common.out.as_deref(), "certificate.json", &doc.to_json())?;
    match (cert, bound) {
        (Some(_), Some(b)) if b.ok => Ok(EXIT_OK),
        (Some(_), Some(b)) => {
            eprintln!("rate bound violated by {:e}", b.worst_slack);
            Ok(EXIT_VERIFY)
        }
        _ => {
            eprintln!("no certificate: run ended with status {:?}", traj.status);
            Ok(EXIT_VERIFY)
        }
    }
}

fn batch(a: BatchArgs) -> CmdResult {
    check_horizon(a.horizon)?;
    let tol = tolerances(a.common.tol)?;
    let mut config = BatchConfig {
        n_games: a.n,
        n_inits: a.n_inits,
        seed: a.seed,
        fp: FpOptions {
            horizon: a.horizon,
            tol,
            ..FpOptions::default()
        },
        metric: a.metric,
        threads: a.threads,
        ..BatchConfig::default()
    };
    if let Some(shape) = a.actions {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Failure::input("--actions needs positive counts"));
        }
        config.shapes = vec![shape];
    }
    let reports = run_batch(&config)?;
    let summary = write_batch_summary(&reports);
    let json = serde_json::to_string_pretty(&summary).expect("summary serialises");
    emit(a.common.out.as_deref(), "summary.json", &json)?;
    eprintln!(
        "{} games, {} runs: {} converged, {} mixed, {} at horizon, {} bound violations",
        summary.games,
        summary.runs,
        summary.converged,
        summary.mixed_equilibrium_reached,
        summary.horizon_reached,
        summary.bound_violations
    );
    if summary.bound_violations > 0 {
        Ok(EXIT_VERIFY)
    } else {
        Ok(EXIT_OK)
    }
}
