//! Test-only oracles, written independently of the library's evaluation
//! and integration paths.

#![allow(dead_code)]

use fictplay::{PotentialGame, XProfile};

pub fn coordination() -> PotentialGame {
    PotentialGame::common_interest(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap()
}

pub fn x2(a: f64, b: f64) -> XProfile {
    XProfile::new(vec![vec![a], vec![b]], 1e-12).unwrap()
}

/// Expected value of a row-major tensor by explicit summation over joint
/// profiles with an odometer.
pub fn brute_expectation(tensor: &[f64], counts: &[usize], sigma: &[Vec<f64>]) -> f64 {
    let n = counts.len();
    let mut y = vec![0usize; n];
    let mut total = 0.0;
    for &value in tensor {
        let w: f64 = (0..n).map(|j| sigma[j][y[j]]).product();
        total += value * w;
        for j in (0..n).rev() {
            y[j] += 1;
            if y[j] < counts[j] {
                break;
            }
            y[j] = 0;
        }
    }
    total
}

/// `U(y_i^k, sigma_{-i})` for every `k`, by brute force.
pub fn brute_payoffs(pg: &PotentialGame, sigma: &[Vec<f64>], player: usize) -> Vec<f64> {
    let counts = pg.action_counts();
    (0..counts[player])
        .map(|k| {
            let mut s = sigma.to_vec();
            s[player] = (0..counts[player]).map(|a| if a == k { 1.0 } else { 0.0 }).collect();
            brute_expectation(pg.potential(), counts, &s)
        })
        .collect()
}

pub fn to_sigma(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|xi| {
            let mut s = vec![1.0 - xi.iter().sum::<f64>()];
            s.extend_from_slice(xi);
            s
        })
        .collect()
}

/// Fixed-step explicit Euler integration of `x' = b(x) - x`, where `b(x)`
/// is the lexicographically smallest exact argmax of each player. Returns
/// the flattened reduced state at every step, starting with `x0`.
pub fn euler_path(pg: &PotentialGame, x0: &XProfile, step: f64, t_end: f64) -> Vec<(f64, Vec<f64>)> {
    let counts = pg.action_counts().to_vec();
    let mut sigma = to_sigma(x0.parts());
    let steps = (t_end / step).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let flat = |s: &[Vec<f64>]| s.iter().flat_map(|p| p[1..].to_vec()).collect::<Vec<f64>>();
    out.push((0.0, flat(&sigma)));
    for n in 1..=steps {
        let targets: Vec<usize> = (0..counts.len())
            .map(|i| {
                let vals = brute_payoffs(pg, &sigma, i);
                let mut best = 0;
                for (k, v) in vals.iter().enumerate() {
                    if *v > vals[best] {
                        best = k;
                    }
                }
                best
            })
            .collect();
        for (i, p) in sigma.iter_mut().enumerate() {
            for (k, w) in p.iter_mut().enumerate() {
                let b = if k == targets[i] { 1.0 } else { 0.0 };
                *w += step * (b - *w);
            }
        }
        out.push((n as f64 * step, flat(&sigma)));
    }
    out
}

/// Largest value of `f` on a uniform grid of `n + 1` points over `[a, b]`.
pub fn grid_max(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    (0..=n)
        .map(|k| f(a + (b - a) * k as f64 / n as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}
