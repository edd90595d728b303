//! Continuous-time fictitious play in finite exact potential games.
//!
//! The crate simulates the fictitious play inclusion `x' in BR(x) - x`
//! exactly, as a chain of closed-form exponential segments joined at
//! best-response switches, and certifies the exponential convergence bound
//! `d(x(t), NE) <= c e^{-t}` for runs that lock onto a strict pure
//! equilibrium.
//!
//! Modules:
//! - [`game`]: games, mixed-strategy coordinates, multilinear evaluation.
//! - [`potential`]: exact potentials (check, extraction, sampling).
//! - [`equilibria`]: best responses, equilibrium enumeration, classification.
//! - [`sim`]: the event-driven simulator.
//! - [`rate`]: distances, certificates and decay fits.
//! - [`batch`]: seeded experiments over many games and starting points.
//! - [`io`]: JSON and CSV formats.

pub mod batch;
pub mod config;
pub mod equilibria;
pub mod error;
pub mod game;
pub mod io;
mod poly;
pub mod potential;
pub mod rate;
pub mod rng;
pub mod sim;

pub use config::{Metric, Tolerances};
pub use equilibria::{
    best_response_set, classify_equilibrium, enumerate_equilibria, enumerate_mixed_nash,
    enumerate_pure_nash, is_nash, pure_best_responses, verify_local_br_lock, BestResponseSet,
    EquilibriumKind, EquilibriumRecord, LockCheck,
};
pub use error::{Error, Result};
pub use game::{from_simplex, to_simplex, Game, SimplexProfile, XProfile};
pub use potential::{
    check_exact_potential, extract_potential, param_dim, sample_potential_game, PotentialCheck,
    PotentialGame,
};
pub use rate::{distance_to_ne, fit_decay, rate_certificate, verify_bound, RateCertificate};
pub use sim::{
    detect_lock_time, next_switch_time, segment_solution, simulate_fp, FpOptions, Segment,
    Trajectory, TrajectoryStatus,
};
