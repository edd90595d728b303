//! Best responses, Nash equilibrium enumeration and classification.
//!
//! Best responses are computed from the potential alone: in an exact
//! potential game each player's argmax of their own expected utility equals
//! the argmax of the expected potential.
//!
//! Mixed equilibria are found by support enumeration. For each support
//! profile the indifference conditions are solved on the potential's
//! restriction. When at most two players mix the conditions are linear and
//! are solved with an SVD least-squares solve. With three or more mixing
//! players the conditions are multilinear; those supports are handled by a
//! damped Newton iteration from a fixed set of seeded starting points.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::game::{multilinear, num_profiles, profiles, unit, vertex, XProfile};
use crate::potential::PotentialGame;

/// Largest joint profile count accepted by [`enumerate_mixed_nash`].
pub const MAX_ENUMERATION_PROFILES: usize = 64;

const NEWTON_STARTS: usize = 96;
const NEWTON_ITERS: usize = 80;
const DEDUP_DISTANCE: f64 = 1e-8;

/// Pure best responses of every player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponseSet {
    pub per_player: Vec<Vec<usize>>,
}

impl BestResponseSet {
    pub fn is_singleton(&self) -> bool {
        self.per_player.iter().all(|s| s.len() == 1)
    }

    /// The unique best-response vertex, if the set is a singleton.
    pub fn vertex(&self) -> Option<Vec<usize>> {
        self.is_singleton()
            .then(|| self.per_player.iter().map(|s| s[0]).collect())
    }

    /// The face of the strategy space spanned by the best responses, as the
    /// list of its vertices.
    pub fn face(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for set in &self.per_player {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    set.iter().map(move |&a| {
                        let mut p = prefix.clone();
                        p.push(a);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumRecord {
    pub profile: XProfile,
    pub kind: EquilibriumKind,
    pub strict: bool,
    pub quasi_strict: bool,
    pub regular: bool,
    /// Actions in the support of each player's strategy.
    pub support: Vec<Vec<usize>>,
}

impl EquilibriumRecord {
    pub fn is_pure(&self) -> bool {
        self.kind == EquilibriumKind::Pure
    }

    /// The joint pure profile of a pure equilibrium.
    pub fn pure_profile(&self) -> Option<Vec<usize>> {
        self.is_pure()
            .then(|| self.support.iter().map(|s| s[0]).collect())
    }
}

/// Outcome of [`verify_local_br_lock`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockCheck {
    pub ok: bool,
    pub min_margin: f64,
    pub samples: usize,
}

fn argmax_within(values: &[f64], tie_tol: f64) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v >= best - tie_tol)
        .map(|(k, _)| k)
        .collect()
}

pub(crate) fn best_responses_sigma(
    pg: &PotentialGame,
    sigma: &[Vec<f64>],
    tie_tol: f64,
) -> BestResponseSet {
    BestResponseSet {
        per_player: (0..pg.n_players())
            .map(|i| argmax_within(&pg.payoffs_against(sigma, i), tie_tol))
            .collect(),
    }
}

/// Pure actions of `player` attaining the maximal expected potential against
/// the opponents' part of `x`, within `tie_tol`.
pub fn pure_best_responses(
    pg: &PotentialGame,
    player: usize,
    x: &XProfile,
    tie_tol: f64,
) -> Result<Vec<usize>> {
    pg.game().check_x_shape(x.parts())?;
    if player >= pg.n_players() {
        return Err(Error::IndexOutOfRange(format!("player {player}")));
    }
    let sigma = x.to_simplex();
    Ok(argmax_within(
        &pg.payoffs_against(sigma.parts(), player),
        tie_tol,
    ))
}

pub fn best_response_set(pg: &PotentialGame, x: &XProfile, tie_tol: f64) -> Result<BestResponseSet> {
    pg.game().check_x_shape(x.parts())?;
    Ok(best_responses_sigma(pg, x.to_simplex().parts(), tie_tol))
}

/// Largest gain any player can obtain by a unilateral pure deviation.
pub(crate) fn max_deviation_gain(pg: &PotentialGame, sigma: &[Vec<f64>]) -> f64 {
    let current = pg.value(sigma);
    (0..pg.n_players())
        .map(|i| {
            pg.payoffs_against(sigma, i)
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max)
                - current
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn is_nash(pg: &PotentialGame, x: &XProfile, tol: f64) -> Result<bool> {
    pg.game().check_x_shape(x.parts())?;
    Ok(max_deviation_gain(pg, x.to_simplex().parts()) <= tol)
}

/// Scans all joint pure profiles for equilibria, in row-major order.
pub fn enumerate_pure_nash(pg: &PotentialGame, tol: &Tolerances) -> Vec<EquilibriumRecord> {
    let counts = pg.action_counts();
    profiles(counts)
        .filter_map(|y| {
            let x = vertex(counts, &y);
            classify_equilibrium(pg, &x, tol).ok()
        })
        .collect()
}

/// All equilibria found by support enumeration, pure ones included, ordered
/// by total support size and then lexicographically by support.
///
/// `max_support` caps the per-player support size.
pub fn enumerate_mixed_nash(
    pg: &PotentialGame,
    max_support: Option<usize>,
    tol: &Tolerances,
) -> Result<Vec<EquilibriumRecord>> {
    let counts = pg.action_counts();
    let k = num_profiles(counts);
    if k > MAX_ENUMERATION_PROFILES {
        return Err(Error::TooLarge {
            profiles: k,
            limit: MAX_ENUMERATION_PROFILES,
        });
    }
    let cap = max_support.unwrap_or(usize::MAX);
    let supports = support_profiles(counts, cap);
    let candidates: Vec<Vec<Vec<Vec<f64>>>> = supports
        .par_iter()
        .map(|s| solve_support(pg, s, tol))
        .collect();

    let mut records: Vec<EquilibriumRecord> = Vec::new();
    let mut seen: Vec<Vec<f64>> = Vec::new();
    for sigma in candidates.into_iter().flatten() {
        let x = XProfile::from_parts_unchecked(sigma.iter().map(|p| p[1..].to_vec()).collect());
        let flat = x.flat();
        if seen.iter().any(|f| {
            f.iter()
                .zip(&flat)
                .all(|(a, b)| (a - b).abs() < DEDUP_DISTANCE)
        }) {
            continue;
        }
        if let Ok(rec) = classify_equilibrium(pg, &x, tol) {
            seen.push(flat);
            records.push(rec);
        }
    }
    Ok(records)
}

/// Every equilibrium the enumerators can find.
pub fn enumerate_equilibria(pg: &PotentialGame, tol: &Tolerances) -> Result<Vec<EquilibriumRecord>> {
    enumerate_mixed_nash(pg, None, tol)
}

fn support_profiles(counts: &[usize], cap: usize) -> Vec<Vec<Vec<usize>>> {
    let per_player: Vec<Vec<Vec<usize>>> = counts
        .iter()
        .map(|&k| {
            let mut subsets: Vec<Vec<usize>> = (1u32..(1 << k))
                .map(|mask| (0..k).filter(|a| mask & (1 << a) != 0).collect::<Vec<_>>())
                .filter(|s: &Vec<usize>| s.len() <= cap)
                .collect();
            subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            subsets
        })
        .collect();
    let mut combos: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for options in &per_player {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |s| {
                    let mut p = prefix.clone();
                    p.push(s.clone());
                    p
                })
            })
            .collect();
    }
    combos.sort_by(|a, b| {
        let size = |c: &Vec<Vec<usize>>| c.iter().map(Vec::len).sum::<usize>();
        size(a).cmp(&size(b)).then_with(|| a.cmp(b))
    });
    combos
}

/// Candidate equilibria with exactly the given support structure.
fn solve_support(
    pg: &PotentialGame,
    support: &[Vec<usize>],
    tol: &Tolerances,
) -> Vec<Vec<Vec<f64>>> {
    let counts = pg.action_counts();
    let mixing: Vec<usize> = (0..support.len()).filter(|&i| support[i].len() > 1).collect();
    let raw = match mixing.len() {
        0 => vec![support
            .iter()
            .zip(counts)
            .map(|(s, &k)| unit(k, s[0]))
            .collect()],
        1 | 2 => solve_linear_support(pg, support, &mixing, tol).into_iter().collect(),
        _ => solve_newton_support(pg, support, &mixing, tol),
    };
    raw.into_iter()
        .filter_map(|sigma| tidy(sigma, support, tol))
        .filter(|sigma| max_deviation_gain(pg, sigma) <= tol.equilibrium)
        .collect()
}

/// Rejects candidates with clearly negative weights and projects tiny
/// negatives back onto the simplex.
fn tidy(mut sigma: Vec<Vec<f64>>, support: &[Vec<usize>], tol: &Tolerances) -> Option<Vec<Vec<f64>>> {
    for (p, s) in sigma.iter_mut().zip(support) {
        if s.iter().any(|&a| p[a] < -tol.support || !p[a].is_finite()) {
            return None;
        }
        for w in p.iter_mut() {
            *w = w.max(0.0);
        }
        let total: f64 = p.iter().sum();
        if total <= 0.0 {
            return None;
        }
        for w in p.iter_mut() {
            *w /= total;
        }
    }
    Some(sigma)
}

fn fixed_sigma(counts: &[usize], support: &[Vec<usize>]) -> Vec<Vec<f64>> {
    support
        .iter()
        .zip(counts)
        .map(|(s, &k)| {
            let mut w = vec![0.0; k];
            for &a in s {
                w[a] = 1.0 / s.len() as f64;
            }
            w
        })
        .collect()
}

/// Indifference plus normalisation when at most two players mix. The
/// unknowns are the full support weights of the mixing players.
fn solve_linear_support(
    pg: &PotentialGame,
    support: &[Vec<usize>],
    mixing: &[usize],
    tol: &Tolerances,
) -> Option<Vec<Vec<f64>>> {
    let counts = pg.action_counts();
    let base = fixed_sigma(counts, support);
    let offsets: Vec<usize> = mixing
        .iter()
        .scan(0, |acc, &i| {
            let o = *acc;
            *acc += support[i].len();
            Some(o)
        })
        .collect();
    let n_unknowns: usize = mixing.iter().map(|&i| support[i].len()).sum();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();

    for (mi, &i) in mixing.iter().enumerate() {
        let other = mixing.iter().position(|&j| j != i);
        let k0 = support[i][0];
        for &k in &support[i][1..] {
            let mut row = vec![0.0; n_unknowns];
            let mut weights = base.clone();
            let mut d = vec![0.0; counts[i]];
            d[k] = 1.0;
            d[k0] = -1.0;
            weights[i] = d;
            match other {
                Some(oj) => {
                    let j = mixing[oj];
                    for (l, &a) in support[j].iter().enumerate() {
                        weights[j] = unit(counts[j], a);
                        row[offsets[oj] + l] = multilinear(pg.potential(), counts, &weights);
                    }
                    rows.push((row, 0.0));
                }
                None => {
                    let c = multilinear(pg.potential(), counts, &weights);
                    rows.push((row, -c));
                }
            }
        }
        let mut norm = vec![0.0; n_unknowns];
        for slot in &mut norm[offsets[mi]..offsets[mi] + support[i].len()] {
            *slot = 1.0;
        }
        rows.push((norm, 1.0));
    }

    let a = DMatrix::from_fn(rows.len(), n_unknowns, |r, c| rows[r].0[c]);
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let svd = a.clone().svd(true, true);
    let v = svd.solve(&b, 1e-12).ok()?;
    let residual = (&a * &v - &b).amax();
    if residual > tol.residual {
        return None;
    }
    let mut sigma = base;
    for (mi, &i) in mixing.iter().enumerate() {
        let mut w = vec![0.0; counts[i]];
        for (l, &a) in support[i].iter().enumerate() {
            w[a] = v[offsets[mi] + l];
        }
        sigma[i] = w;
    }
    Some(sigma)
}

/// Gradient of `U` in the support's tangent coordinates: the weights of the
/// non-reference support actions of each mixing player.
pub(crate) fn support_gradient(pg: &PotentialGame, sigma: &[Vec<f64>], support: &[Vec<usize>]) -> Vec<f64> {
    let counts = pg.action_counts();
    let mut out = Vec::new();
    for (i, s) in support.iter().enumerate() {
        for &k in &s[1..] {
            let mut weights = sigma.to_vec();
            let mut d = vec![0.0; counts[i]];
            d[k] = 1.0;
            d[s[0]] = -1.0;
            weights[i] = d;
            out.push(multilinear(pg.potential(), counts, &weights));
        }
    }
    out
}

/// Hessian of `U` in the support's tangent coordinates. Blocks on the
/// diagonal vanish because `U` is linear in each player's own strategy.
pub fn support_hessian(pg: &PotentialGame, sigma: &[Vec<f64>], support: &[Vec<usize>]) -> DMatrix<f64> {
    let counts = pg.action_counts();
    let coords: Vec<(usize, usize)> = support
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s[1..].iter().map(move |&k| (i, k)))
        .collect();
    let n = coords.len();
    let mut h = DMatrix::zeros(n, n);
    for r in 0..n {
        for c in r + 1..n {
            let (i, k) = coords[r];
            let (j, l) = coords[c];
            if i == j {
                continue;
            }
            let mut weights = sigma.to_vec();
            let mut di = vec![0.0; counts[i]];
            di[k] = 1.0;
            di[support[i][0]] = -1.0;
            let mut dj = vec![0.0; counts[j]];
            dj[l] = 1.0;
            dj[support[j][0]] = -1.0;
            weights[i] = di;
            weights[j] = dj;
            let v = multilinear(pg.potential(), counts, &weights);
            h[(r, c)] = v;
            h[(c, r)] = v;
        }
    }
    h
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn sigma_from_tangent(base: &[Vec<f64>], support: &[Vec<usize>], z: &[f64]) -> Vec<Vec<f64>> {
    let mut sigma = base.to_vec();
    let mut pos = 0;
    for (i, s) in support.iter().enumerate() {
        if s.len() < 2 {
            continue;
        }
        let w = &mut sigma[i];
        w.iter_mut().for_each(|v| *v = 0.0);
        let mut rest = 0.0;
        for &k in &s[1..] {
            w[k] = z[pos];
            rest += z[pos];
            pos += 1;
        }
        w[s[0]] = 1.0 - rest;
    }
    sigma
}

fn solve_newton_support(
    pg: &PotentialGame,
    support: &[Vec<usize>],
    mixing: &[usize],
    tol: &Tolerances,
) -> Vec<Vec<Vec<f64>>> {
    let counts = pg.action_counts();
    let base = fixed_sigma(counts, support);
    let scale = pg
        .potential()
        .iter()
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    let target = 1e-13 * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_d0f5_u64);
    let mut found: Vec<Vec<Vec<f64>>> = Vec::new();

    for _ in 0..NEWTON_STARTS {
        // Uniform start on each mixing player's support simplex.
        let mut z = Vec::new();
        for &i in mixing {
            let e: Vec<f64> = (0..support[i].len())
                .map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln())
                .collect();
            let total: f64 = e.iter().sum();
            z.extend(e[1..].iter().map(|v| v / total));
        }
        let residual = |z: &[f64]| {
            let sigma = sigma_from_tangent(&base, support, z);
            support_gradient(pg, &sigma, support)
        };
        let mut f = residual(&z);
        let mut norm = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for _ in 0..NEWTON_ITERS {
            if norm < target {
                break;
            }
            let sigma = sigma_from_tangent(&base, support, &z);
            let jac = support_hessian(pg, &sigma, support);
            let rhs = DVector::from_iterator(f.len(), f.iter().map(|v| -v));
            let Ok(step) = jac.svd(true, true).solve(&rhs, 1e-14) else {
                break;
            };
            let mut alpha = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let trial: Vec<f64> = z.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
                let ft = residual(&trial);
                let nt = ft.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                if nt < norm {
                    z = trial;
                    f = ft;
                    norm = nt;
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if norm >= tol.residual.min(1e-10 * scale) {
            continue;
        }
        let sigma = sigma_from_tangent(&base, support, &z);
        let dup = found.iter().any(|other| {
            other
                .iter()
                .flatten()
                .zip(sigma.iter().flatten())
                .all(|(a, b)| (a - b).abs() < DEDUP_DISTANCE)
        });
        if !dup {
            found.push(sigma);
        }
    }
    found
}

/// Labels an equilibrium as pure or mixed, strict, quasi-strict and
/// regular.
///
/// A pure equilibrium is regular exactly when it is strict. A mixed
/// equilibrium is regular when it is quasi-strict and the Hessian of the
/// potential restricted to the tangent space of its support is nonsingular
/// (condition number below `tol.max_condition`).
pub fn classify_equilibrium(
    pg: &PotentialGame,
    x: &XProfile,
    tol: &Tolerances,
) -> Result<EquilibriumRecord> {
    pg.game().check_x_shape(x.parts())?;
    let sigma = x.to_simplex();
    let gain = max_deviation_gain(pg, sigma.parts());
    if gain > tol.equilibrium {
        return Err(Error::NotAnEquilibrium { gain });
    }
    let support = sigma.support(tol.support);
    let br = best_responses_sigma(pg, sigma.parts(), tol.tie);
    let quasi_strict = br
        .per_player
        .iter()
        .zip(&support)
        .all(|(b, s)| b.iter().all(|a| s.contains(a)));
    let pure = support.iter().all(|s| s.len() == 1);
    let strict = pure && quasi_strict;
    let regular = if pure {
        strict
    } else {
        quasi_strict
            && condition_number(&support_hessian(pg, sigma.parts(), &support)) < tol.max_condition
    };
    Ok(EquilibriumRecord {
        profile: x.clone(),
        kind: if pure {
            EquilibriumKind::Pure
        } else {
            EquilibriumKind::Mixed
        },
        strict,
        quasi_strict,
        regular,
        support,
    })
}

/// Smallest advantage of the equilibrium action over any alternative, for
/// the least-committed player, at a pure profile.
pub fn strict_margin(pg: &PotentialGame, y: &[usize]) -> f64 {
    let x = vertex(pg.action_counts(), y);
    lock_margin_at(pg, x.to_simplex().parts(), y)
}

fn lock_margin_at(pg: &PotentialGame, sigma: &[Vec<f64>], y: &[usize]) -> f64 {
    (0..pg.n_players())
        .map(|i| {
            let vals = pg.payoffs_against(sigma, i);
            let rival = vals
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != y[i])
                .map(|(_, v)| *v)
                .fold(f64::NEG_INFINITY, f64::max);
            vals[y[i]] - rival
        })
        .fold(f64::INFINITY, f64::min)
}

/// A radius around a strict pure equilibrium on which its best-response
/// lock is guaranteed by a Lipschitz bound: every gap stays above half the
/// equilibrium's strict margin.
pub fn certified_lock_radius(pg: &PotentialGame, y: &[usize]) -> f64 {
    let margin = strict_margin(pg, y);
    let (lo, hi) = pg
        .potential()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    let kappa = crate::game::kappa_of(pg.action_counts()) as f64;
    // Each gap is a difference of two expectations of u, so its partial
    // derivatives are bounded by twice the range of u.
    let lipschitz = 2.0 * 2.0 * (hi - lo).max(f64::MIN_POSITIVE) * kappa.sqrt();
    (margin / (2.0 * lipschitz)).clamp(0.0, 1.0)
}

/// Samples points uniformly in the ball of `radius` around the strict pure
/// equilibrium `x_star`, intersected with the strategy space, and checks that
/// `x_star` is the unique best response at each of them.
pub fn verify_local_br_lock(
    pg: &PotentialGame,
    x_star: &XProfile,
    radius: f64,
    n_samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<LockCheck> {
    let rec = classify_equilibrium(pg, x_star, tol).map_err(|_| Error::NotStrictPure)?;
    let y = match (rec.strict, rec.pure_profile()) {
        (true, Some(y)) => y,
        _ => return Err(Error::NotStrictPure),
    };
    let counts = pg.action_counts();
    let center = x_star.flat();
    let dim = center.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_margin = f64::INFINITY;
    let mut taken = 0;
    let max_attempts = n_samples.saturating_mul(100_000).max(1);
    let mut attempts = 0;
    while taken < n_samples && attempts < max_attempts {
        attempts += 1;
        let dir: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 {
            continue;
        }
        let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
        let point: Vec<f64> = center.iter().zip(&dir).map(|(c, d)| c + r * d / len).collect();
        let Ok(x) = XProfile::from_flat(counts, &point, 0.0) else {
            continue;
        };
        taken += 1;
        min_margin = min_margin.min(lock_margin_at(pg, x.to_simplex().parts(), &y));
    }
    Ok(LockCheck {
        ok: taken > 0 && min_margin > tol.tie,
        min_margin,
        samples: taken,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coordination() -> PotentialGame {
        PotentialGame::common_interest(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn x2(a: f64, b: f64) -> XProfile {
        XProfile::new(vec![vec![a], vec![b]], 1e-12).unwrap()
    }

    #[test]
    fn best_responses_follow_opponent_weight() {
        let pg = coordination();
        assert_eq!(pure_best_responses(&pg, 0, &x2(0.0, 0.3), 1e-9).unwrap(), vec![0]);
        assert_eq!(pure_best_responses(&pg, 0, &x2(0.0, 0.5), 1e-9).unwrap(), vec![0, 1]);
        assert_eq!(pure_best_responses(&pg, 0, &x2(0.0, 0.8), 1e-9).unwrap(), vec![1]);
        let br = best_response_set(&pg, &x2(0.8, 0.3), 1e-9).unwrap();
        assert_eq!(br.per_player, vec![vec![0], vec![1]]);
        assert_eq!(br.vertex(), Some(vec![0, 1]));
        let br = best_response_set(&pg, &x2(0.5, 0.5), 1e-9).unwrap();
        assert_eq!(br.face().len(), 4);
    }

    #[test]
    fn nash_checks() {
        let pg = coordination();
        assert!(is_nash(&pg, &x2(0.0, 0.0), 1e-9).unwrap());
        assert!(is_nash(&pg, &x2(0.5, 0.5), 1e-9).unwrap());
        assert!(!is_nash(&pg, &x2(0.3, 0.3), 1e-9).unwrap());
    }

    #[test]
    fn coordination_equilibria() {
        let tol = Tolerances::default();
        let pg = coordination();
        let pure = enumerate_pure_nash(&pg, &tol);
        assert_eq!(pure.len(), 2);
        assert_eq!(pure[0].profile, x2(0.0, 0.0));
        assert_eq!(pure[1].profile, x2(1.0, 1.0));
        assert!(pure.iter().all(|r| r.strict && r.regular && r.quasi_strict));

        let all = enumerate_mixed_nash(&pg, None, &tol).unwrap();
        assert_eq!(all.len(), 3);
        let mixed = &all[2];
        assert_eq!(mixed.kind, EquilibriumKind::Mixed);
        assert!((mixed.profile.flat()[0] - 0.5).abs() < 1e-12);
        assert!(mixed.quasi_strict && mixed.regular && !mixed.strict);
    }

    #[test]
    fn unequal_coordination_mixes_at_one_third() {
        let tol = Tolerances::default();
        let pg = PotentialGame::common_interest(vec![2, 2], vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        let all = enumerate_mixed_nash(&pg, None, &tol).unwrap();
        let mixed: Vec<_> = all.iter().filter(|r| !r.is_pure()).collect();
        assert_eq!(mixed.len(), 1);
        // weight on the first action is 1/3, so the reduced coordinate is 2/3
        for v in mixed[0].profile.flat() {
            assert!((v - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dominance_solvable_has_single_equilibrium() {
        let tol = Tolerances::default();
        // Action 0 strictly dominant for both players.
        let pg = PotentialGame::common_interest(vec![2, 2], vec![3.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(enumerate_pure_nash(&pg, &tol).len(), 1);
        let all = enumerate_mixed_nash(&pg, None, &tol).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_pure());
    }

    #[test]
    fn constant_game_is_degenerate() {
        let tol = Tolerances::default();
        let pg = PotentialGame::common_interest(vec![2, 2], vec![1.0; 4]).unwrap();
        let pure = enumerate_pure_nash(&pg, &tol);
        assert_eq!(pure.len(), 4);
        assert!(pure.iter().all(|r| !r.strict && !r.regular));
    }

    #[test]
    fn classification_rejects_non_equilibria() {
        let pg = coordination();
        assert!(matches!(
            classify_equilibrium(&pg, &x2(0.3, 0.3), &Tolerances::default()),
            Err(Error::NotAnEquilibrium { .. })
        ));
    }

    #[test]
    fn hessian_of_coordination() {
        let pg = coordination();
        let h = support_hessian(&pg, &[vec![0.5, 0.5], vec![0.5, 0.5]], &[vec![0, 1], vec![0, 1]]);
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0]));
    }

    #[test]
    fn local_lock_radii() {
        let pg = coordination();
        let tol = Tolerances::default();
        let origin = x2(0.0, 0.0);
        let c = verify_local_br_lock(&pg, &origin, 0.2, 1000, 1, &tol).unwrap();
        assert!(c.ok && c.min_margin >= 0.6 - 1e-12);
        assert!(verify_local_br_lock(&pg, &origin, 0.49, 1000, 2, &tol).unwrap().ok);
        assert!(!verify_local_br_lock(&pg, &origin, 0.6, 1000, 3, &tol).unwrap().ok);
        assert!(matches!(
            verify_local_br_lock(&pg, &x2(0.5, 0.5), 0.1, 10, 0, &tol),
            Err(Error::NotStrictPure)
        ));
        let r = certified_lock_radius(&pg, &[0, 0]);
        assert!(r > 0.0 && verify_local_br_lock(&pg, &origin, r, 500, 4, &tol).unwrap().ok);
    }

    #[test]
    fn too_large_games_are_refused() {
        let pg = PotentialGame::common_interest(vec![5, 5, 3], vec![0.0; 75]).unwrap();
        assert!(matches!(
            enumerate_mixed_nash(&pg, None, &Tolerances::default()),
            Err(Error::TooLarge { .. })
        ));
    }
}
