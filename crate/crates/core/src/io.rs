//! File formats: game JSON, equilibrium lists, trajectory CSV with its event
//! log, and rate certificates.
//!
//! Action and player indices are 1-based in every file and 0-based in
//! memory. Flat tensors use the row-major order of [`crate::game`]. Reduced
//! coordinates are flattened player by player; the CSV column `x{i}_{k}`
//! holds player `i`'s weight on action `k` for `k >= 2`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{Metric, Tolerances};
use crate::equilibria::{EquilibriumKind, EquilibriumRecord};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::potential::{extract_potential, PotentialGame};
use crate::rate::{distance_to_ne, BoundCheck, RateCertificate};
use crate::sim::{Trajectory, TrajectoryStatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub players: usize,
    pub actions: Vec<usize>,
    pub utilities: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<f64>>,
}

impl GameFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game files serialise")
    }

    pub fn from_potential_game(pg: &PotentialGame) -> Self {
        Self {
            players: pg.n_players(),
            actions: pg.action_counts().to_vec(),
            utilities: pg.game().utilities().to_vec(),
            potential: Some(pg.potential().to_vec()),
        }
    }

    /// Structural validation of the raw description.
    pub fn to_game(&self) -> Result<Game> {
        if self.players != self.actions.len() {
            return Err(Error::InvalidCounts(format!(
                "`players` is {} but {} action counts are given",
                self.players,
                self.actions.len()
            )));
        }
        Game::new(self.actions.clone(), self.utilities.clone())
    }

    /// Uses the stored potential when present, after verifying it; otherwise
    /// extracts one.
    pub fn to_potential_game(&self, tol: &Tolerances) -> Result<PotentialGame> {
        let game = self.to_game()?;
        match &self.potential {
            Some(p) => PotentialGame::new(game, p.clone(), tol.potential),
            None => extract_potential(&game, tol.potential),
        }
    }
}

/// Parses and validates a game description.
pub fn validate_game(raw: &str) -> Result<Game> {
    GameFile::from_json(raw)?.to_game()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumJson {
    /// Reduced coordinates per player.
    pub profile: Vec<Vec<f64>>,
    /// Full mixed strategy per player.
    pub strategy: Vec<Vec<f64>>,
    pub kind: EquilibriumKind,
    pub strict: bool,
    pub quasi_strict: bool,
    pub regular: bool,
    /// 1-based actions in each player's support.
    pub support: Vec<Vec<usize>>,
}

impl From<&EquilibriumRecord> for EquilibriumJson {
    fn from(r: &EquilibriumRecord) -> Self {
        Self {
            profile: r.profile.parts().to_vec(),
            strategy: r.profile.to_simplex().into_parts(),
            kind: r.kind,
            strict: r.strict,
            quasi_strict: r.quasi_strict,
            regular: r.regular,
            support: r
                .support
                .iter()
                .map(|s| s.iter().map(|a| a + 1).collect())
                .collect(),
        }
    }
}

pub fn equilibria_json(records: &[EquilibriumRecord]) -> String {
    let out: Vec<EquilibriumJson> = records.iter().map(Into::into).collect();
    serde_json::to_string_pretty(&out).expect("equilibria serialise")
}

pub fn csv_header(counts: &[usize]) -> String {
    let mut cols = vec!["t".to_string(), "segment_id".to_string()];
    for (i, &k) in counts.iter().enumerate() {
        for a in 2..=k {
            cols.push(format!("x{}_{}", i + 1, a));
        }
    }
    cols.push("U".into());
    cols.push("d_ne".into());
    cols.join(",")
}

/// One row per sample point: `per_segment` interior points per segment plus
/// both endpoints.
pub fn trajectory_csv(
    pg: &PotentialGame,
    traj: &Trajectory,
    equilibria: &[EquilibriumRecord],
    metric: Metric,
    per_segment: usize,
) -> Result<String> {
    let mut out = csv_header(pg.action_counts());
    out.push('\n');
    for s in traj.sample(per_segment) {
        let u = pg.value(s.x.to_simplex().parts());
        let d = distance_to_ne(&s.x, equilibria, metric)?;
        write!(out, "{},{}", s.t, s.segment).unwrap();
        for v in s.x.flat() {
            write!(out, ",{v}").unwrap();
        }
        writeln!(out, ",{u},{d}").unwrap();
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
struct EventJson {
    time: f64,
    player: usize,
    leaving: Vec<usize>,
    entering: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
struct SegmentJson {
    t_start: f64,
    t_end: f64,
    target: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
struct EventLogJson {
    status: TrajectoryStatus,
    end_time: f64,
    limit: Option<Vec<f64>>,
    segments: Vec<SegmentJson>,
    events: Vec<EventJson>,
}

pub fn event_log_json(traj: &Trajectory) -> String {
    let one_based = |v: &[usize]| v.iter().map(|a| a + 1).collect::<Vec<_>>();
    let log = EventLogJson {
        status: traj.status,
        end_time: traj.end_time,
        limit: traj.limit.as_ref().map(|x| x.flat()),
        segments: traj
            .segments
            .iter()
            .map(|s| SegmentJson {
                t_start: s.t_start,
                t_end: s.t_end,
                target: one_based(&s.target_actions),
            })
            .collect(),
        events: traj
            .events
            .iter()
            .map(|e| EventJson {
                time: e.time,
                player: e.player + 1,
                leaving: one_based(&e.leaving),
                entering: one_based(&e.entering),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&log).expect("event log serialises")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub x_star: Option<Vec<f64>>,
    pub tau: Option<f64>,
    pub c: Option<f64>,
    pub lock_margin: Option<f64>,
    pub status: TrajectoryStatus,
    pub metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundCheck>,
}

impl CertificateJson {
    pub fn new(
        status: TrajectoryStatus,
        cert: Option<&RateCertificate>,
        bound: Option<BoundCheck>,
        metric: Metric,
    ) -> Self {
        Self {
            x_star: cert.map(|c| c.x_star.flat()),
            tau: cert.map(|c| c.tau),
            c: cert.map(|c| c.c),
            lock_margin: cert.map(|c| c.lock_margin),
            status,
            metric,
            bound,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn game_json_round_trip() {
        let raw = r#"{"players": 2, "actions": [2, 2], "utilities": [[1,0,0,1],[1,0,0,1]]}"#;
        let file = GameFile::from_json(raw).unwrap();
        let pg = file.to_potential_game(&Tolerances::default()).unwrap();
        assert_eq!(pg.potential(), &[0.0, -1.0, -1.0, 0.0]);
        let again = GameFile::from_json(&GameFile::from_potential_game(&pg).to_json()).unwrap();
        assert_eq!(again.potential.as_deref(), Some(pg.potential()));
    }

    #[test]
    fn validation_errors_surface() {
        assert!(matches!(
            validate_game(r#"{"players": 2, "actions": [2, 2], "utilities": [[1,0,0],[1,0,0,1]]}"#),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            validate_game(r#"{"players": 1, "actions": [2], "utilities": [[1,0]]}"#),
            Err(Error::InvalidCounts(_))
        ));
        assert!(matches!(validate_game("{"), Err(Error::Json(_))));
    }

    #[test]
    fn header_names_reduced_coordinates() {
        assert_eq!(csv_header(&[2, 3]), "t,segment_id,x1_2,x2_2,x2_3,U,d_ne");
    }
}
