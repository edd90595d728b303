//! Event-driven integration of continuous-time fictitious play,
//! `x' in BR(x) - x`.
//!
//! While the joint best response is a single vertex `b`, the solution is the
//! exponential ray `x(t) = b + (x_start - b) e^{-(t - t_start)}`. Substituting
//! `s = e^{-(t - t_start)}` turns every best-response gap
//! `U(y_i^k, x_{-i}) - U(y_i^m, x_{-i})` into a polynomial in `s` of degree at
//! most `N - 1`, so switches are found as polynomial roots instead of by time
//! stepping.
//!
//! A run stops at any Nash equilibrium with a tied best response, since
//! solutions are not unique from such points. Elsewhere, at a switch point the
//! next vertex is chosen by looking at the sign of each gap just after the
//! switch along the candidate ray. Among candidates that keep their own best
//! response, the lexicographically smallest wins.

use serde::{Deserialize, Serialize};

use crate::config::{Metric, Tolerances};
use crate::equilibria::{best_responses_sigma, max_deviation_gain, strict_margin};
use crate::error::{Error, Result};
use crate::game::{multilinear, unit, vertex, XProfile};
use crate::poly::Poly;
use crate::potential::PotentialGame;

/// One piece of a trajectory on which the best response is a fixed vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub x_start: XProfile,
    pub target: XProfile,
    /// Pure actions of the target vertex, 0-based.
    pub target_actions: Vec<usize>,
}

impl Segment {
    fn decay(&self, t: f64) -> f64 {
        (-(t - self.t_start)).exp()
    }

    pub fn state_at(&self, t: f64) -> XProfile {
        let e = self.decay(t);
        XProfile::from_parts_unchecked(
            self.x_start
                .parts()
                .iter()
                .zip(self.target.parts())
                .map(|(x, b)| x.iter().zip(b).map(|(x, b)| b + (x - b) * e).collect())
                .collect(),
        )
    }

    /// `x(t) - b`, flattened, computed without cancellation.
    pub fn offset_at(&self, t: f64) -> Vec<f64> {
        let e = self.decay(t);
        self.x_start
            .flat()
            .iter()
            .zip(self.target.flat())
            .map(|(x, b)| (x - b) * e)
            .collect()
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// Closed-form FP state after `dt` time units toward the fixed vertex `b`.
pub fn segment_solution(x0: &XProfile, b: &XProfile, dt: f64) -> XProfile {
    let e = (-dt).exp();
    XProfile::from_parts_unchecked(
        x0.parts()
            .iter()
            .zip(b.parts())
            .map(|(x, b)| x.iter().zip(b).map(|(x, b)| b + (x - b) * e).collect())
            .collect(),
    )
}

/// A change of one player's best response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub time: f64,
    pub player: usize,
    pub leaving: Vec<usize>,
    pub entering: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryStatus {
    Converged,
    MixedEquilibriumReached,
    HorizonReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x0: XProfile,
    pub segments: Vec<Segment>,
    pub events: Vec<SwitchEvent>,
    pub status: TrajectoryStatus,
    /// The equilibrium reached, for converged runs and mixed captures.
    pub limit: Option<XProfile>,
    /// Last time covered by the stored segments.
    pub end_time: f64,
}

/// A point on a sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub segment: usize,
    pub x: XProfile,
}

impl Trajectory {
    pub fn state_at(&self, t: f64) -> XProfile {
        match self.segment_index_at(t) {
            Some(k) => self.segments[k].state_at(t),
            None => self.x0.clone(),
        }
    }

    fn segment_index_at(&self, t: f64) -> Option<usize> {
        if self.segments.is_empty() {
            return None;
        }
        let k = self.segments.partition_point(|s| s.t_end < t);
        Some(k.min(self.segments.len() - 1))
    }

    /// `per_segment` interior points of every segment plus both endpoints.
    pub fn sample(&self, per_segment: usize) -> Vec<TrajectorySample> {
        if self.segments.is_empty() {
            return vec![TrajectorySample {
                t: 0.0,
                segment: 0,
                x: self.x0.clone(),
            }];
        }
        let mut out = Vec::with_capacity(self.segments.len() * (per_segment + 2));
        for (k, seg) in self.segments.iter().enumerate() {
            for t in sample_times(seg, per_segment) {
                out.push(TrajectorySample {
                    t,
                    segment: k,
                    x: seg.state_at(t),
                });
            }
        }
        out
    }

    pub fn final_segment(&self) -> Option<&Segment> {
        self.segments.last()
    }
}

pub(crate) fn sample_times(seg: &Segment, per_segment: usize) -> impl Iterator<Item = f64> + '_ {
    let n = per_segment + 1;
    (0..=n).map(move |k| {
        if k == n {
            seg.t_end
        } else {
            seg.t_start + seg.duration() * k as f64 / n as f64
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpOptions {
    pub horizon: f64,
    pub tol: Tolerances,
    /// Grid subintervals used to bracket switch roots.
    pub grid: usize,
    /// Safety stop for runs that keep switching.
    pub max_events: usize,
}

impl Default for FpOptions {
    fn default() -> Self {
        Self {
            horizon: 50.0,
            tol: Tolerances::default(),
            grid: 64,
            max_events: 10_000,
        }
    }
}

/// Gap `U(y_i^{keep}, x_{-i}(s)) - U(y_i^{rival}, x_{-i}(s))` along the ray
/// from `sigma0` toward vertex `b`, as a polynomial in `s`.
fn gap_poly(
    pg: &PotentialGame,
    sigma0: &[Vec<f64>],
    b: &[usize],
    player: usize,
    keep: usize,
    rival: usize,
) -> Poly {
    let counts = pg.action_counts();
    let n = counts.len();
    let others: Vec<usize> = (0..n).filter(|&j| j != player).collect();
    let mut diff = vec![0.0; counts[player]];
    diff[keep] += 1.0;
    diff[rival] -= 1.0;
    let mut coeffs = vec![0.0; others.len() + 1];
    // sigma_j(s) = e_{b_j} + (sigma0_j - e_{b_j}) s; expand the product over
    // which opponents contribute their slope term.
    for mask in 0u32..(1 << others.len()) {
        let mut weights: Vec<Vec<f64>> = Vec::with_capacity(n);
        for j in 0..n {
            if j == player {
                weights.push(diff.clone());
                continue;
            }
            let pos = others.iter().position(|&o| o == j).unwrap();
            let base = unit(counts[j], b[j]);
            if mask & (1 << pos) != 0 {
                weights.push(sigma0[j].iter().zip(&base).map(|(s, e)| s - e).collect());
            } else {
                weights.push(base);
            }
        }
        coeffs[mask.count_ones() as usize] += multilinear(pg.potential(), counts, &weights);
    }
    Poly::new(coeffs)
}

/// A gap polynomial with its zeros at the segment start divided out.
struct StartGap {
    /// Multiplicity of the root at `s = 1` that was removed.
    order: usize,
    rest: Poly,
    vanishes: bool,
}

impl StartGap {
    fn new(p: Poly, tie: f64) -> Self {
        let mut rest = p;
        let mut order = 0;
        while rest.eval(1.0).abs() <= tie {
            if rest.is_negligible(tie) || rest.degree() == 0 {
                return Self {
                    order,
                    rest,
                    vanishes: true,
                };
            }
            rest = rest.deflate_at_one();
            order += 1;
        }
        Self {
            order,
            rest,
            vanishes: false,
        }
    }

    /// Sign of the gap just after the segment start (`s` slightly below 1).
    fn initial_sign(&self) -> f64 {
        if self.vanishes {
            return 0.0;
        }
        let sign = self.rest.eval(1.0).signum();
        if self.order % 2 == 1 {
            -sign
        } else {
            sign
        }
    }

    /// Largest `s` in `[lo, 1)` where the gap changes sign.
    fn last_crossing(&self, lo: f64, grid: usize, time_tol: f64) -> Option<f64> {
        if self.vanishes {
            return None;
        }
        self.rest
            .sign_change_roots(lo, 1.0, grid, time_tol)
            .into_iter()
            .rfind(|&s| s < 1.0)
    }
}

fn gaps_for(pg: &PotentialGame, sigma0: &[Vec<f64>], b: &[usize], tie: f64) -> Vec<StartGap> {
    let counts = pg.action_counts();
    let mut out = Vec::new();
    for (i, &k) in counts.iter().enumerate() {
        for m in (0..k).filter(|&m| m != b[i]) {
            out.push(StartGap::new(gap_poly(pg, sigma0, b, i, b[i], m), tie));
        }
    }
    out
}

/// Picks the vertex to move toward from `sigma`: the lexicographically
/// smallest tied candidate that stays a best response just after leaving
/// `sigma`. Returns `None` when no candidate does.
fn select_target(pg: &PotentialGame, sigma: &[Vec<f64>], tol: &Tolerances) -> Option<Vec<usize>> {
    let br = best_responses_sigma(pg, sigma, tol.tie);
    br.face().into_iter().find(|b| {
        gaps_for(pg, sigma, b, tol.tie)
            .iter()
            .all(|g| g.vanishes || g.initial_sign() > 0.0)
    })
}

/// Largest `s` in `[lo, 1)` at which one of the gaps for `b` changes sign.
fn next_crossing(
    pg: &PotentialGame,
    sigma0: &[Vec<f64>],
    b: &[usize],
    lo: f64,
    opts: &FpOptions,
) -> Option<f64> {
    gaps_for(pg, sigma0, b, opts.tol.tie)
        .iter()
        .filter_map(|g| g.last_crossing(lo, opts.grid, opts.tol.time))
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))))
}

/// Time after the segment start at which the best response next changes
/// along the ray toward `b`, if it changes before `horizon`.
pub fn next_switch_time(
    pg: &PotentialGame,
    x0: &XProfile,
    b: &[usize],
    horizon: f64,
    opts: &FpOptions,
) -> Result<Option<f64>> {
    pg.game().check_x_shape(x0.parts())?;
    let sigma = x0.to_simplex();
    let br = best_responses_sigma(pg, sigma.parts(), opts.tol.tie);
    if br.vertex().as_deref() != Some(b) {
        return Err(Error::DegenerateSegment);
    }
    let lo = (-horizon).exp();
    Ok(next_crossing(pg, sigma.parts(), b, lo, opts).map(|s| -s.ln()))
}

fn advance(sigma0: &[Vec<f64>], b: &[usize], s: f64) -> Vec<Vec<f64>> {
    sigma0
        .iter()
        .zip(b)
        .map(|(p, &bj)| {
            p.iter()
                .enumerate()
                .map(|(k, w)| {
                    let e = if k == bj { 1.0 } else { 0.0 };
                    e + (w - e) * s
                })
                .collect()
        })
        .collect()
}

fn to_x(sigma: &[Vec<f64>]) -> XProfile {
    XProfile::from_parts_unchecked(sigma.iter().map(|p| p[1..].to_vec()).collect())
}

/// Runs fictitious play from `x0` until it locks onto a strict pure
/// equilibrium, reaches a mixed equilibrium, or hits the horizon.
pub fn simulate_fp(pg: &PotentialGame, x0: &XProfile, opts: &FpOptions) -> Result<Trajectory> {
    pg.game().check_x_shape(x0.parts())?;
    let x0 = XProfile::new(x0.parts().to_vec(), opts.tol.polytope)?;
    let counts = pg.action_counts().to_vec();
    let tol = &opts.tol;
    let mut sigma = x0.to_simplex().into_parts();
    let mut t = 0.0;
    let mut segments: Vec<Segment> = Vec::new();
    let mut events: Vec<SwitchEvent> = Vec::new();
    let mut previous: Option<Vec<usize>> = None;

    let finish = |segments, events, status, limit, end_time| Trajectory {
        x0: x0.clone(),
        segments,
        events,
        status,
        limit,
        end_time,
    };

    loop {
        let br = best_responses_sigma(pg, &sigma, tol.tie);
        if !br.is_singleton() && max_deviation_gain(pg, &sigma) <= tol.equilibrium {
            if let Some(prev) = &previous {
                for (i, set) in br.per_player.iter().enumerate() {
                    if set.len() > 1 || set[0] != prev[i] {
                        events.push(SwitchEvent {
                            time: t,
                            player: i,
                            leaving: vec![prev[i]],
                            entering: set.iter().copied().filter(|&a| a != prev[i]).collect(),
                        });
                    }
                }
            }
            let limit = Some(to_x(&sigma));
            return Ok(finish(
                segments,
                events,
                TrajectoryStatus::MixedEquilibriumReached,
                limit,
                t,
            ));
        }
        // Off equilibrium with no self-consistent candidate, fall back to the
        // lexicographically smallest best response.
        let b = select_target(pg, &sigma, tol).unwrap_or_else(|| br.face().remove(0));

        if let Some(prev) = &previous {
            for i in (0..counts.len()).filter(|&i| prev[i] != b[i]) {
                events.push(SwitchEvent {
                    time: t,
                    player: i,
                    leaving: vec![prev[i]],
                    entering: vec![b[i]],
                });
            }
        }
        if events.len() > opts.max_events {
            return Ok(finish(segments, events, TrajectoryStatus::HorizonReached, None, t));
        }

        let x_start = to_x(&sigma);
        let target = vertex(&counts, &b);
        let remaining = opts.horizon - t;
        let crossing = next_crossing(pg, &sigma, &b, 0.0, opts);
        let s_horizon = (-remaining).exp();

        match crossing {
            Some(s) if s >= s_horizon => {
                let t_next = t - s.ln();
                segments.push(Segment {
                    t_start: t,
                    t_end: t_next,
                    x_start,
                    target,
                    target_actions: b.clone(),
                });
                sigma = advance(&sigma, &b, s);
                t = t_next;
                previous = Some(b);
            }
            _ => {
                let locked = crossing.is_none() && strict_margin(pg, &b) > tol.tie;
                let end = opts.horizon.max(t);
                segments.push(Segment {
                    t_start: t,
                    t_end: end,
                    x_start,
                    target: target.clone(),
                    target_actions: b,
                });
                let (status, limit) = if locked {
                    (TrajectoryStatus::Converged, Some(target))
                } else {
                    (TrajectoryStatus::HorizonReached, None)
                };
                return Ok(finish(segments, events, status, limit, end));
            }
        }
    }
}

/// Lock time and limit of a converged run: the start and target of its final
/// segment, after which the distance to the limit decays as `e^{-t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LockTime {
    pub tau: f64,
    pub x_star: XProfile,
    pub actions: Vec<usize>,
}

pub fn detect_lock_time(traj: &Trajectory) -> Result<LockTime> {
    if traj.status != TrajectoryStatus::Converged {
        return Err(Error::NotConverged);
    }
    let seg = traj.final_segment().ok_or(Error::NotConverged)?;
    Ok(LockTime {
        tau: seg.t_start,
        x_star: seg.target.clone(),
        actions: seg.target_actions.clone(),
    })
}

/// Rate of change of the potential along the trajectory at time `t` inside
/// segment `seg`: `sum_i [U(b_i, x_{-i}) - U(x)]`.
pub fn potential_rate(pg: &PotentialGame, seg: &Segment, t: f64) -> f64 {
    let sigma = seg.state_at(t).to_simplex();
    let u = pg.value(sigma.parts());
    seg.target_actions
        .iter()
        .enumerate()
        .map(|(i, &b)| pg.payoffs_against(sigma.parts(), i)[b] - u)
        .sum()
}

/// Euclidean or sup distance between the state at `t` and the limit,
/// using the cancellation-free offset on segments that head to the limit.
pub fn distance_to_limit(traj: &Trajectory, t: f64, metric: Metric) -> Option<f64> {
    let limit = traj.limit.as_ref()?;
    let k = traj.segment_index_at(t)?;
    let seg = &traj.segments[k];
    if &seg.target == limit {
        Some(metric.norm(seg.offset_at(t)))
    } else {
        Some(metric.distance(&seg.state_at(t).flat(), &limit.flat()))
    }
}
