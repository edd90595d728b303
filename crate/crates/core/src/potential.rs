//! Exact potential games: verification, extraction by telescoping and
//! seeded sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::game::{
    conditional_values, flat_index, multilinear, num_profiles, profile_at, Game, SimplexProfile,
    XProfile,
};

/// A game together with an exact potential `u` over joint pure profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGame {
    game: Game,
    potential: Vec<f64>,
}

/// Outcome of [`check_exact_potential`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialCheck {
    pub ok: bool,
    pub max_violation: f64,
}

impl PotentialGame {
    /// Pairs `game` with `potential` after verifying the exact-potential
    /// identity to within `tol`.
    pub fn new(game: Game, potential: Vec<f64>, tol: f64) -> Result<Self> {
        let check = check_exact_potential(&game, &potential, tol)?;
        if !check.ok {
            return Err(Error::NotPotentialGame {
                max_violation: check.max_violation,
            });
        }
        Ok(Self { game, potential })
    }

    /// Common-interest game: every player's utility is the potential itself.
    pub fn common_interest(counts: Vec<usize>, potential: Vec<f64>) -> Result<Self> {
        let game = Game::new(counts.clone(), vec![potential.clone(); counts.len()])?;
        Ok(Self { game, potential })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn action_counts(&self) -> &[usize] {
        self.game.action_counts()
    }

    pub fn n_players(&self) -> usize {
        self.game.n_players()
    }

    /// `U` at a joint mixed strategy; no validation.
    pub fn value(&self, sigma: &[Vec<f64>]) -> f64 {
        multilinear(&self.potential, self.game.action_counts(), sigma)
    }

    /// `U(y_i^k, sigma_{-i})` for every action `k` of `player`.
    pub fn payoffs_against(&self, sigma: &[Vec<f64>], player: usize) -> Vec<f64> {
        conditional_values(&self.potential, self.game.action_counts(), sigma, player)
    }

    /// Expected potential at a reduced profile.
    pub fn expected_potential(&self, x: &XProfile, tol: f64) -> Result<f64> {
        self.game.check_x_shape(x.parts())?;
        let x = XProfile::new(x.parts().to_vec(), tol)?;
        Ok(self.value(x.to_simplex().parts()))
    }

    /// `U(x)` expanded along one player's coordinates:
    /// `sum_k x_i^k U(y_i^{k+1}, x_{-i}) + (1 - sum_k x_i^k) U(y_i^1, x_{-i})`.
    pub fn expected_potential_along(&self, x: &XProfile, player: usize) -> Result<f64> {
        self.game.check_x_shape(x.parts())?;
        let sigma = x.to_simplex();
        let vals = self.payoffs_against(sigma.parts(), player);
        let xi = &x.parts()[player];
        let head = 1.0 - xi.iter().sum::<f64>();
        Ok(head * vals[0] + xi.iter().zip(&vals[1..]).map(|(a, v)| a * v).sum::<f64>())
    }

    pub fn expected_utility(&self, player: usize, sigma: &SimplexProfile) -> Result<f64> {
        self.game.expected_utility(player, sigma)
    }
}

/// Largest mismatch between a player's unilateral utility differences and
/// the candidate's, over all players, opponent profiles and action pairs.
pub fn check_exact_potential(game: &Game, candidate: &[f64], tol: f64) -> Result<PotentialCheck> {
    let counts = game.action_counts();
    let k = num_profiles(counts);
    if candidate.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: candidate.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for i in 0..game.n_players() {
        let u = game.utility(i);
        // Within each fibre (y_{-i} fixed) the residual u_i - u must be constant.
        for_each_fibre(counts, i, |fibre| {
            let (lo, hi) = fibre
                .iter()
                .map(|&idx| u[idx] - candidate[idx])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r), hi.max(r))
                });
            worst = worst.max(hi - lo);
        });
    }
    Ok(PotentialCheck {
        ok: worst <= tol,
        max_violation: worst,
    })
}

/// Calls `f` with the flat indices of every line along `player`'s axis.
pub(crate) fn for_each_fibre(counts: &[usize], player: usize, mut f: impl FnMut(&[usize])) {
    let stride: usize = counts[player + 1..].iter().product();
    let k = counts[player];
    let mut fibre = vec![0; k];
    for base in 0..num_profiles(counts) {
        if !(base / stride).is_multiple_of(k) {
            continue;
        }
        for (a, slot) in fibre.iter_mut().enumerate() {
            *slot = base + a * stride;
        }
        f(&fibre);
    }
}

/// Recovers a potential by telescoping unilateral deviations along the
/// coordinate path from the all-first-actions profile, anchored at zero.
pub fn extract_potential(game: &Game, tol: f64) -> Result<PotentialGame> {
    let counts = game.action_counts();
    let potential: Vec<f64> = (0..num_profiles(counts))
        .map(|idx| {
            let y = profile_at(counts, idx);
            let mut step = vec![0; counts.len()];
            let mut acc = 0.0;
            for i in 0..counts.len() {
                let before = flat_index(counts, &step);
                step[i] = y[i];
                let after = flat_index(counts, &step);
                acc += game.utility(i)[after] - game.utility(i)[before];
            }
            acc
        })
        .collect();
    PotentialGame::new(game.clone(), potential, tol)
}

/// Largest absolute signed sum of utility changes around a unilateral
/// 4-cycle in any two-player, two-action restriction of the game. Zero for
/// exact potential games.
pub fn max_cycle_violation(game: &Game) -> f64 {
    let counts = game.action_counts();
    let mut worst: f64 = 0.0;
    for y in (0..num_profiles(counts)).map(|i| profile_at(counts, i)) {
        for i in 0..counts.len() {
            for j in i + 1..counts.len() {
                for a2 in y[i] + 1..counts[i] {
                    for b2 in y[j] + 1..counts[j] {
                        let at = |ai: usize, bj: usize| {
                            let mut z = y.clone();
                            z[i] = ai;
                            z[j] = bj;
                            flat_index(counts, &z)
                        };
                        let (a1, b1) = (y[i], y[j]);
                        let (ui, uj) = (game.utility(i), game.utility(j));
                        let sum = (ui[at(a2, b1)] - ui[at(a1, b1)])
                            + (uj[at(a2, b2)] - uj[at(a2, b1)])
                            + (ui[at(a1, b2)] - ui[at(a2, b2)])
                            + (uj[at(a1, b1)] - uj[at(a1, b2)]);
                        worst = worst.max(sum.abs());
                    }
                }
            }
        }
    }
    worst
}

/// Dimension of the space of potential games with these action counts.
pub fn param_dim(counts: &[usize]) -> usize {
    let k = num_profiles(counts);
    let dummies: usize = (0..counts.len()).map(|i| k / counts[i]).sum();
    dummies + counts.len() + k - 1
}

/// Draws a potential game `u_i = w + q_i(y_{-i})` with standard normal `w`
/// and dummy terms. Deterministic in `seed`.
pub fn sample_potential_game(counts: &[usize], seed: u64) -> Result<PotentialGame> {
    sample_potential_game_with(counts, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_potential_game_with<R: rand::Rng + ?Sized>(
    counts: &[usize],
    rng: &mut R,
) -> Result<PotentialGame> {
    // Validate counts before drawing anything.
    Game::new(counts.to_vec(), vec![vec![0.0; num_profiles(counts)]; counts.len()])?;
    let k = num_profiles(counts);
    let w: Vec<f64> = (0..k).map(|_| StandardNormal.sample(rng)).collect();
    let mut utilities = Vec::with_capacity(counts.len());
    for i in 0..counts.len() {
        let mut u = w.clone();
        let mut dummy_counts = counts.to_vec();
        dummy_counts.remove(i);
        let q: Vec<f64> = (0..k / counts[i])
            .map(|_| StandardNormal.sample(rng))
            .collect();
        for (idx, slot) in u.iter_mut().enumerate() {
            let mut y = profile_at(counts, idx);
            y.remove(i);
            *slot += q[flat_index(&dummy_counts, &y)];
        }
        utilities.push(u);
    }
    let game = Game::new(counts.to_vec(), utilities)?;
    Ok(PotentialGame { game, potential: w })
}
