//! Seeded batch experiments: sample potential games, run fictitious play
//! from uniform initial conditions and certify every converged run.
//!
//! Games run in parallel; each game's initial conditions run in order on the
//! same worker. All randomness comes from [`crate::rng::substream`], so the
//! results only depend on the configuration.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Metric;
use crate::equilibria::{certified_lock_radius, enumerate_equilibria, verify_local_br_lock, LockCheck};
use crate::error::Result;
use crate::potential::{sample_potential_game_with, PotentialGame};
use crate::rate::{fit_decay, rate_certificate, verify_bound, DecayFit, CHECK_GRID};
use crate::rng::{substream, uniform_profile, Stream};
use crate::sim::{potential_rate, sample_times, simulate_fp, FpOptions, Trajectory, TrajectoryStatus};

#[derive(Debug, Clone)]
pub struct BatchConfig {
    /// Action-count shapes, used round-robin across games.
    pub shapes: Vec<Vec<usize>>,
    pub n_games: usize,
    pub n_inits: usize,
    pub seed: u64,
    pub fp: FpOptions,
    pub metric: Metric,
    /// Samples per neighbourhood check of a strict pure equilibrium.
    pub lock_samples: usize,
    /// Worker threads; `None` uses every available processor.
    pub threads: Option<usize>,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            shapes: vec![vec![2, 2], vec![2, 3], vec![3, 2], vec![3, 3], vec![2, 2, 2]],
            n_games: 100,
            n_inits: 20,
            seed: 0,
            fp: FpOptions::default(),
            metric: Metric::Euclidean,
            lock_samples: 1000,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LockReport {
    pub profile: Vec<usize>,
    pub radius: f64,
    pub ok: bool,
    pub min_margin: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub game: usize,
    pub init: usize,
    pub x0: Vec<f64>,
    pub status: TrajectoryStatus,
    pub events: usize,
    pub limit_pure: bool,
    pub tau: Option<f64>,
    pub c: Option<f64>,
    pub bound_ok: Option<bool>,
    pub worst_slack: Option<f64>,
    /// Largest deviation from exact exponential decay after the lock time.
    pub post_lock_error: Option<f64>,
    pub decay: Option<DecayFit>,
    /// Smallest `dU/dt` seen at the sample points.
    pub min_ascent_rate: f64,
    /// Smallest change of `U` between consecutive samples of a segment.
    pub min_potential_step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GameReport {
    pub index: usize,
    pub actions: Vec<usize>,
    pub equilibria: usize,
    pub pure_equilibria: usize,
    pub regular: bool,
    pub locks: Vec<LockReport>,
    pub runs: Vec<RunRecord>,
}

pub fn sample_game(config: &BatchConfig, index: usize) -> Result<PotentialGame> {
    let shape = &config.shapes[index % config.shapes.len()];
    sample_potential_game_with(shape, &mut substream(config.seed, Stream::Games, index as u64))
}

/// Potential ascent along a trajectory: the smallest instantaneous rate and
/// the smallest step between consecutive samples.
pub fn potential_ascent(pg: &PotentialGame, traj: &Trajectory, per_segment: usize) -> (f64, f64) {
    let mut min_rate = f64::INFINITY;
    let mut min_step = f64::INFINITY;
    for seg in &traj.segments {
        let mut prev: Option<f64> = None;
        for t in sample_times(seg, per_segment) {
            min_rate = min_rate.min(potential_rate(pg, seg, t));
            let u = pg.value(seg.state_at(t).to_simplex().parts());
            if let Some(p) = prev {
                min_step = min_step.min(u - p);
            }
            prev = Some(u);
        }
    }
    (min_rate, min_step)
}

fn post_lock_error(traj: &Trajectory, tau: f64, metric: Metric) -> Option<f64> {
    let seg = traj.final_segment()?;
    let star = seg.target.flat();
    let d_tau = metric.distance(&seg.x_start.flat(), &star);
    Some(
        sample_times(seg, CHECK_GRID)
            .map(|t| (metric.distance(&seg.state_at(t).flat(), &star) - d_tau * (tau - t).exp()).abs())
            .fold(0.0, f64::max),
    )
}

pub fn run_game(config: &BatchConfig, index: usize) -> Result<GameReport> {
    let pg = sample_game(config, index)?;
    let tol = &config.fp.tol;
    let equilibria = enumerate_equilibria(&pg, tol)?;
    let regular = !equilibria.is_empty() && equilibria.iter().all(|e| e.regular);

    let mut locks = Vec::new();
    for (k, eq) in equilibria.iter().enumerate().filter(|(_, e)| e.strict) {
        let y = eq.pure_profile().expect("strict equilibria are pure");
        let radius = certified_lock_radius(&pg, &y);
        let seed_rng = ((index as u64) << 16) | k as u64;
        let LockCheck { ok, min_margin, samples } = verify_local_br_lock(
            &pg,
            &eq.profile,
            radius,
            config.lock_samples,
            rand::Rng::gen(&mut substream(config.seed, Stream::Neighbourhood, seed_rng)),
            tol,
        )?;
        locks.push(LockReport {
            profile: y,
            radius,
            ok,
            min_margin,
            samples,
        });
    }

    let mut runs = Vec::with_capacity(config.n_inits);
    for init in 0..config.n_inits {
        let mut rng = substream(
            config.seed,
            Stream::InitialConditions,
            ((index as u64) << 32) | init as u64,
        );
        let x0 = uniform_profile(pg.action_counts(), &mut rng);
        let traj = simulate_fp(&pg, &x0, &config.fp)?;
        let (min_ascent_rate, min_potential_step) = potential_ascent(&pg, &traj, CHECK_GRID);
        let mut record = RunRecord {
            game: index,
            init,
            x0: x0.flat(),
            status: traj.status,
            events: traj.events.len(),
            limit_pure: false,
            tau: None,
            c: None,
            bound_ok: None,
            worst_slack: None,
            post_lock_error: None,
            decay: None,
            min_ascent_rate,
            min_potential_step,
        };
        if traj.status == TrajectoryStatus::Converged {
            let cert = rate_certificate(&traj, &pg, config.metric)?;
            let check = verify_bound(&traj, &cert, &equilibria, tol.equilibrium)?;
            record.limit_pure = true;
            record.tau = Some(cert.tau);
            record.c = Some(cert.c);
            record.bound_ok = Some(check.ok);
            record.worst_slack = Some(check.worst_slack);
            record.post_lock_error = post_lock_error(&traj, cert.tau, config.metric);
            record.decay = fit_decay(&traj, cert.tau, config.metric);
        }
        runs.push(record);
    }

    Ok(GameReport {
        index,
        actions: pg.action_counts().to_vec(),
        equilibria: equilibria.len(),
        pure_equilibria: equilibria.iter().filter(|e| e.is_pure()).count(),
        regular,
        locks,
        runs,
    })
}

pub fn run_batch(config: &BatchConfig) -> Result<Vec<GameReport>> {
    let work = || {
        (0..config.n_games)
            .into_par_iter()
            .map(|g| run_game(config, g))
            .collect::<Result<Vec<_>>>()
    };
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let at = |q: f64| {
            let pos = q * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Self {
            min: v[0],
            q25: at(0.25),
            median: at(0.5),
            q75: at(0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunStatus {
    pub game: usize,
    pub init: usize,
    pub status: TrajectoryStatus,
    pub tau: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchSummary {
    pub games: usize,
    pub runs: usize,
    pub converged: usize,
    pub mixed_equilibrium_reached: usize,
    pub horizon_reached: usize,
    pub fraction_regular: f64,
    pub fraction_converged_to_pure: f64,
    pub bound_violations: usize,
    pub tau: Option<Quantiles>,
    pub c: Option<Quantiles>,
    pub per_run: Vec<RunStatus>,
}

fn fraction(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Aggregates batch results into a summary document.
pub fn write_batch_summary(results: &[GameReport]) -> BatchSummary {
    let runs: Vec<&RunRecord> = results.iter().flat_map(|g| &g.runs).collect();
    let count = |s: TrajectoryStatus| runs.iter().filter(|r| r.status == s).count();
    let taus: Vec<f64> = runs.iter().filter_map(|r| r.tau).collect();
    let cs: Vec<f64> = runs.iter().filter_map(|r| r.c).collect();
    BatchSummary {
        games: results.len(),
        runs: runs.len(),
        converged: count(TrajectoryStatus::Converged),
        mixed_equilibrium_reached: count(TrajectoryStatus::MixedEquilibriumReached),
        horizon_reached: count(TrajectoryStatus::HorizonReached),
        fraction_regular: fraction(results.iter().filter(|g| g.regular).count(), results.len()),
        fraction_converged_to_pure: fraction(runs.iter().filter(|r| r.limit_pure).count(), runs.len()),
        bound_violations: runs.iter().filter(|r| r.bound_ok == Some(false)).count(),
        tau: Quantiles::of(&taus),
        c: Quantiles::of(&cs),
        per_run: runs
            .iter()
            .map(|r| RunStatus {
                game: r.game,
                init: r.init,
                status: r.status,
                tau: r.tau,
                c: r.c,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_summary_has_zero_counts() {
        let s = write_batch_summary(&[]);
        assert_eq!(s.runs, 0);
        assert_eq!(s.converged, 0);
        assert_eq!(s.fraction_converged_to_pure, 0.0);
        assert!(s.tau.is_none());
    }

    #[test]
    fn quantiles_interpolate() {
        let q = Quantiles::of(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((q.min, q.median, q.max), (1.0, 3.0, 5.0));
        assert_eq!(q.q25, 2.0);
    }

    #[test]
    fn small_batch_is_deterministic() {
        let config = BatchConfig {
            n_games: 3,
            n_inits: 2,
            seed: 42,
            ..Default::default()
        };
        let a = serde_json::to_string(&write_batch_summary(&run_batch(&config).unwrap())).unwrap();
        let b = serde_json::to_string(&write_batch_summary(&run_batch(&config).unwrap())).unwrap();
        assert_eq!(a, b);
    }
}
