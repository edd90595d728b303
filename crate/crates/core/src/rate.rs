//! Distance to the equilibrium set, exponential rate certificates
//! `d(x(t), NE) <= c e^{-t}` and their verification.
//!
//! Once a run locks onto its limit `x*` at time `tau`, the state moves along
//! `x* + (x(tau) - x*) e^{-(t - tau)}`, so the distance decays exactly like
//! `e^{-t}`. Taking `c = e^{tau} sup_{[0, tau]} d(x(t), x*)` covers the
//! transient part as well.

use serde::{Deserialize, Serialize};

use crate::config::Metric;
use crate::equilibria::{strict_margin, EquilibriumRecord};
use crate::error::{Error, Result};
use crate::game::XProfile;
use crate::potential::PotentialGame;
use crate::sim::{detect_lock_time, distance_to_limit, sample_times, Segment, Trajectory};

/// Grid resolution used when maximising the distance over a segment.
pub const SUP_GRID: usize = 1000;
/// Samples per segment used by the bound check and the decay fit.
pub const CHECK_GRID: usize = 200;

const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RateCertificate {
    pub x_star: XProfile,
    pub tau: f64,
    pub c: f64,
    /// Strict-equilibrium margin of `x*`: how much every unilateral
    /// deviation loses there.
    pub lock_margin: f64,
    pub metric: Metric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub ok: bool,
    pub worst_slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub lambda: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Distance from `x` to the nearest listed equilibrium.
pub fn distance_to_ne(x: &XProfile, equilibria: &[EquilibriumRecord], metric: Metric) -> Result<f64> {
    if equilibria.is_empty() {
        return Err(Error::EmptyEquilibriumList);
    }
    let flat = x.flat();
    Ok(equilibria
        .iter()
        .map(|e| metric.distance(&flat, &e.profile.flat()))
        .fold(f64::INFINITY, f64::min))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Maximum over a segment of the distance to `x_star`: grid search followed
/// by golden-section refinement around the best grid point.
fn segment_sup(seg: &Segment, x_star: &[f64], metric: Metric) -> f64 {
    let f = |t: f64| metric.distance(&seg.state_at(t).flat(), x_star);
    let times: Vec<f64> = sample_times(seg, SUP_GRID - 1).collect();
    let values: Vec<f64> = times.iter().map(|&t| f(t)).collect();
    let (k, &best) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let lo = times[k.saturating_sub(1)];
    let hi = times[(k + 1).min(times.len() - 1)];
    if hi <= lo {
        return best;
    }
    let (_, refined) = golden_max(f, lo, hi);
    best.max(refined)
}

pub fn rate_certificate(traj: &Trajectory, pg: &PotentialGame, metric: Metric) -> Result<RateCertificate> {
    let lock = detect_lock_time(traj)?;
    let star = lock.x_star.flat();
    let mut sup = metric.distance(&traj.x0.flat(), &star);
    for seg in traj.segments.iter().filter(|s| s.t_start < lock.tau) {
        sup = sup.max(segment_sup(seg, &star, metric));
    }
    Ok(RateCertificate {
        c: lock.tau.exp() * sup,
        tau: lock.tau,
        lock_margin: strict_margin(pg, &lock.actions),
        x_star: lock.x_star,
        metric,
    })
}

/// Checks `d(x(t), NE) <= c e^{-t} + tol` on the sampling grid of every
/// segment.
pub fn verify_bound(
    traj: &Trajectory,
    cert: &RateCertificate,
    equilibria: &[EquilibriumRecord],
    tol: f64,
) -> Result<BoundCheck> {
    let mut worst = f64::NEG_INFINITY;
    for sample in traj.sample(CHECK_GRID) {
        let d = distance_to_ne(&sample.x, equilibria, cert.metric)?;
        worst = worst.max(d - cert.c * (-sample.t).exp());
    }
    Ok(BoundCheck {
        ok: worst <= tol,
        worst_slack: worst,
    })
}

/// Least-squares slope of `log d(x(t), x*)` against `t` over the sampled
/// points with `t >= t_from`; `lambda` is minus the slope.
pub fn fit_decay(traj: &Trajectory, t_from: f64, metric: Metric) -> Option<DecayFit> {
    traj.limit.as_ref()?;
    let points: Vec<(f64, f64)> = traj
        .segments
        .iter()
        .flat_map(|seg| sample_times(seg, CHECK_GRID).collect::<Vec<_>>())
        .filter(|&t| t >= t_from)
        .filter_map(|t| {
            let d = distance_to_limit(traj, t, metric)?;
            (d > 1e-14).then(|| (t, d.ln()))
        })
        .collect();
    if points.len() < 10 {
        return None;
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = points.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sty: f64 = points.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if stt == 0.0 {
        return None;
    }
    let slope = sty / stt;
    let r_squared = if syy == 0.0 { 1.0 } else { sty * sty / (stt * syy) };
    Some(DecayFit {
        lambda: -slope,
        r_squared,
        samples: points.len(),
    })
}
