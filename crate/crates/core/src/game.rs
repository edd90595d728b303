//! Normal-form games, the two mixed-strategy coordinate systems and
//! multilinear evaluation of payoff tensors.
//!
//! A payoff tensor over joint pure strategies is stored flat in row-major
//! order: the last player's action index varies fastest. Action indices are
//! 0-based throughout the library; the file formats in [`crate::io`] shift
//! them to 1-based.
//!
//! Mixed strategies live either in the product of simplices (a
//! [`SimplexProfile`]) or in reduced coordinates (an [`XProfile`]) where each
//! player's weight on their first action is dropped. The map between the two
//! is affine, so straight lines and exponential rays are preserved by it.

use crate::error::{Error, Result};

/// Number of joint pure profiles, `K = prod K_i`.
pub fn num_profiles(counts: &[usize]) -> usize {
    counts.iter().product()
}

/// Dimension of the reduced strategy space, `sum (K_i - 1)`.
pub fn kappa_of(counts: &[usize]) -> usize {
    counts.iter().map(|k| k - 1).sum()
}

/// Flat row-major index of a joint pure profile.
pub fn flat_index(counts: &[usize], profile: &[usize]) -> usize {
    profile
        .iter()
        .zip(counts)
        .fold(0, |acc, (&a, &k)| acc * k + a)
}

/// Joint pure profile at a flat row-major index.
pub fn profile_at(counts: &[usize], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; counts.len()];
    for (slot, &k) in out.iter_mut().zip(counts).rev() {
        *slot = index % k;
        index /= k;
    }
    out
}

/// Iterates over all joint pure profiles in row-major order.
pub fn profiles(counts: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..num_profiles(counts)).map(move |i| profile_at(counts, i))
}

/// Evaluates the multilinear form of `tensor` with one weight vector per
/// player: `sum_y tensor(y) * prod_j weights[j][y_j]`.
///
/// Weights need not be probability vectors; derivatives of the multilinear
/// extension are evaluated by passing difference vectors such as
/// `e_k - e_m`.
pub fn multilinear<W: AsRef<[f64]>>(tensor: &[f64], counts: &[usize], weights: &[W]) -> f64 {
    debug_assert_eq!(tensor.len(), num_profiles(counts));
    debug_assert_eq!(weights.len(), counts.len());
    let mut cur: Vec<f64> = tensor.to_vec();
    for (j, &k) in counts.iter().enumerate().rev() {
        let w = weights[j].as_ref();
        cur = cur
            .chunks_exact(k)
            .map(|chunk| chunk.iter().zip(w).map(|(a, b)| a * b).sum())
            .collect();
    }
    cur[0]
}

/// Values `tensor(y_i^k, sigma_{-i})` for every action `k` of `player`.
pub fn conditional_values(
    tensor: &[f64],
    counts: &[usize],
    sigma: &[Vec<f64>],
    player: usize,
) -> Vec<f64> {
    let mut weights: Vec<Vec<f64>> = sigma.to_vec();
    (0..counts[player])
        .map(|k| {
            weights[player] = unit(counts[player], k);
            multilinear(tensor, counts, &weights)
        })
        .collect()
}

pub(crate) fn unit(len: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[k] = 1.0;
    v
}

/// A finite normal-form game with real payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    counts: Vec<usize>,
    utilities: Vec<Vec<f64>>,
}

impl Game {
    /// Validates dimensions and builds a game. Tensors are expected in the
    /// canonical row-major layout.
    pub fn new(counts: Vec<usize>, utilities: Vec<Vec<f64>>) -> Result<Self> {
        check_counts(&counts)?;
        if utilities.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: counts.len(),
                found: utilities.len(),
            });
        }
        let k = num_profiles(&counts);
        for u in &utilities {
            if u.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: u.len(),
                });
            }
            if u.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidCounts("utilities must be finite".into()));
            }
        }
        Ok(Self { counts, utilities })
    }

    pub fn n_players(&self) -> usize {
        self.counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_profiles(&self) -> usize {
        num_profiles(&self.counts)
    }

    pub fn kappa(&self) -> usize {
        kappa_of(&self.counts)
    }

    pub fn utility(&self, player: usize) -> &[f64] {
        &self.utilities[player]
    }

    pub fn utilities(&self) -> &[Vec<f64>] {
        &self.utilities
    }

    pub fn expected_utility(&self, player: usize, sigma: &SimplexProfile) -> Result<f64> {
        if player >= self.n_players() {
            return Err(Error::IndexOutOfRange(format!(
                "player {player} of {}",
                self.n_players()
            )));
        }
        self.check_shape(sigma.parts())?;
        Ok(multilinear(&self.utilities[player], &self.counts, sigma.parts()))
    }

    /// The reduced profile that puts all mass on the joint pure profile `y`.
    pub fn vertex_profile(&self, y: &[usize]) -> Result<XProfile> {
        if y.len() != self.n_players() {
            return Err(Error::DimensionMismatch {
                expected: self.n_players(),
                found: y.len(),
            });
        }
        for (i, (&a, &k)) in y.iter().zip(&self.counts).enumerate() {
            if a >= k {
                return Err(Error::IndexOutOfRange(format!(
                    "action {a} of player {i} (has {k})"
                )));
            }
        }
        Ok(vertex(&self.counts, y))
    }

    pub(crate) fn check_shape(&self, parts: &[Vec<f64>]) -> Result<()> {
        check_shape(&self.counts, parts, 0)
    }

    pub(crate) fn check_x_shape(&self, parts: &[Vec<f64>]) -> Result<()> {
        check_shape(&self.counts, parts, 1)
    }
}

fn check_counts(counts: &[usize]) -> Result<()> {
    if counts.len() < 2 {
        return Err(Error::InvalidCounts(format!(
            "need at least 2 players, got {}",
            counts.len()
        )));
    }
    if let Some((i, k)) = counts.iter().enumerate().find(|(_, &k)| k < 2) {
        return Err(Error::InvalidCounts(format!(
            "player {i} has {k} actions; at least 2 required"
        )));
    }
    Ok(())
}

fn check_shape(counts: &[usize], parts: &[Vec<f64>], dropped: usize) -> Result<()> {
    if parts.len() != counts.len() {
        return Err(Error::DimensionMismatch {
            expected: counts.len(),
            found: parts.len(),
        });
    }
    for (p, &k) in parts.iter().zip(counts) {
        if p.len() != k - dropped {
            return Err(Error::DimensionMismatch {
                expected: k - dropped,
                found: p.len(),
            });
        }
    }
    Ok(())
}

pub(crate) fn vertex(counts: &[usize], y: &[usize]) -> XProfile {
    XProfile(
        y.iter()
            .zip(counts)
            .map(|(&a, &k)| {
                let mut x = vec![0.0; k - 1];
                if a > 0 {
                    x[a - 1] = 1.0;
                }
                x
            })
            .collect(),
    )
}

/// Joint mixed strategy as one probability vector per player.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexProfile(Vec<Vec<f64>>);

impl SimplexProfile {
    /// Checks nonnegativity and unit sums within `tol`.
    pub fn new(parts: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        for (i, p) in parts.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::InvalidSimplex(format!("player {i} has no weights")));
            }
            if let Some(w) = p.iter().find(|w| w.is_nan() || **w < -tol) {
                return Err(Error::InvalidSimplex(format!(
                    "player {i} has negative weight {w}"
                )));
            }
            let s: f64 = p.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::InvalidSimplex(format!(
                    "weights of player {i} sum to {s}"
                )));
            }
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<Vec<f64>> {
        self.0
    }

    /// Inverse of [`XProfile::to_simplex`]: drops each first weight.
    pub fn to_x(&self) -> XProfile {
        XProfile(self.0.iter().map(|p| p[1..].to_vec()).collect())
    }

    /// Actions carrying weight strictly above `threshold`, per player.
    pub fn support(&self, threshold: f64) -> Vec<Vec<usize>> {
        self.0
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .filter(|(_, w)| **w > threshold)
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect()
    }
}

/// Joint mixed strategy in reduced coordinates: player `i` holds the weights
/// of actions `2..=K_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct XProfile(Vec<Vec<f64>>);

impl XProfile {
    /// Checks that every entry lies in `[0, 1]` and each player's entries sum
    /// to at most one, all within `tol`.
    pub fn new(parts: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        for (i, p) in parts.iter().enumerate() {
            if let Some(v) = p.iter().find(|v| !(**v >= -tol && **v <= 1.0 + tol)) {
                return Err(Error::OutOfPolytope(format!(
                    "coordinate {v} of player {i} outside [0, 1]"
                )));
            }
            let s: f64 = p.iter().sum();
            if s > 1.0 + tol {
                return Err(Error::OutOfPolytope(format!(
                    "coordinates of player {i} sum to {s} > 1"
                )));
            }
        }
        Ok(Self(parts))
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<Vec<f64>>) -> Self {
        Self(parts)
    }

    /// Splits a flat coordinate vector according to the action counts.
    pub fn from_flat(counts: &[usize], flat: &[f64], tol: f64) -> Result<Self> {
        let kappa = kappa_of(counts);
        if flat.len() != kappa {
            return Err(Error::DimensionMismatch {
                expected: kappa,
                found: flat.len(),
            });
        }
        let mut parts = Vec::with_capacity(counts.len());
        let mut offset = 0;
        for &k in counts {
            parts.push(flat[offset..offset + k - 1].to_vec());
            offset += k - 1;
        }
        Self::new(parts, tol)
    }

    pub fn parts(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn flat(&self) -> Vec<f64> {
        self.0.iter().flatten().copied().collect()
    }

    /// The bijection onto the product of simplices.
    pub fn to_simplex(&self) -> SimplexProfile {
        SimplexProfile(
            self.0
                .iter()
                .map(|x| {
                    let mut s = Vec::with_capacity(x.len() + 1);
                    s.push(1.0 - x.iter().sum::<f64>());
                    s.extend_from_slice(x);
                    s
                })
                .collect(),
        )
    }
}

/// Validating form of [`XProfile::to_simplex`].
pub fn to_simplex(x: &XProfile, tol: f64) -> Result<SimplexProfile> {
    let x = XProfile::new(x.0.clone(), tol)?;
    Ok(x.to_simplex())
}

/// Validating form of [`SimplexProfile::to_x`].
pub fn from_simplex(sigma: &SimplexProfile, tol: f64) -> Result<XProfile> {
    let sigma = SimplexProfile::new(sigma.0.clone(), tol)?;
    Ok(sigma.to_x())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn coordination() -> Game {
        Game::new(vec![2, 2], vec![vec![1.0, 0.0, 0.0, 1.0]; 2]).unwrap()
    }

    #[test]
    fn validate_rejects_bad_shapes() {
        assert!(coordination().n_players() == 2);
        assert!(matches!(
            Game::new(vec![2, 2], vec![vec![1.0; 3], vec![1.0; 4]]),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
        assert!(matches!(
            Game::new(vec![2], vec![vec![0.0; 2]]),
            Err(Error::InvalidCounts(_))
        ));
        assert!(matches!(
            Game::new(vec![2, 1], vec![vec![0.0; 2]; 2]),
            Err(Error::InvalidCounts(_))
        ));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_of(&[2, 2]), 2);
        assert_eq!(kappa_of(&[3, 3]), 4);
        assert_eq!(kappa_of(&[2, 3, 4]), 6);
    }

    #[test]
    fn coordinate_maps() {
        let x = XProfile::new(vec![vec![0.3], vec![0.0, 0.0]], 1e-12).unwrap();
        let s = x.to_simplex();
        assert_abs_diff_eq!(s.parts()[0][0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(s.parts()[0][1], 0.3, epsilon = 1e-15);
        assert_eq!(s.parts()[1], vec![1.0, 0.0, 0.0]);

        let s = SimplexProfile::new(vec![vec![1.0, 0.0], vec![0.25, 0.25, 0.5]], 1e-12).unwrap();
        assert_eq!(s.to_x().parts(), &[vec![0.0], vec![0.25, 0.5]]);
        assert!(matches!(
            SimplexProfile::new(vec![vec![0.5, 0.6]], 1e-12),
            Err(Error::InvalidSimplex(_))
        ));
        assert!(matches!(
            SimplexProfile::new(vec![vec![1.5, -0.5]], 1e-12),
            Err(Error::InvalidSimplex(_))
        ));
        assert!(matches!(
            XProfile::new(vec![vec![0.6, 0.6]], 1e-12),
            Err(Error::OutOfPolytope(_))
        ));
        assert!(matches!(
            to_simplex(&XProfile(vec![vec![-0.1]]), 1e-12),
            Err(Error::OutOfPolytope(_))
        ));
    }

    #[test]
    fn expected_utility_of_coordination() {
        let g = coordination();
        let pure = SimplexProfile::new(vec![vec![1.0, 0.0]; 2], 1e-12).unwrap();
        assert_eq!(g.expected_utility(0, &pure).unwrap(), 1.0);
        let half = SimplexProfile::new(vec![vec![0.5, 0.5]; 2], 1e-12).unwrap();
        assert_abs_diff_eq!(g.expected_utility(1, &half).unwrap(), 0.5, epsilon = 1e-15);
        assert!(g.expected_utility(2, &half).is_err());
    }

    #[test]
    fn vertex_profiles() {
        let g = coordination();
        assert_eq!(g.vertex_profile(&[0, 0]).unwrap().parts(), &[vec![0.0], vec![0.0]]);
        assert_eq!(g.vertex_profile(&[1, 1]).unwrap().parts(), &[vec![1.0], vec![1.0]]);
        let g = Game::new(vec![3, 2], vec![vec![0.0; 6]; 2]).unwrap();
        assert_eq!(
            g.vertex_profile(&[1, 0]).unwrap().parts(),
            &[vec![1.0, 0.0], vec![0.0]]
        );
        assert!(matches!(
            g.vertex_profile(&[3, 0]),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn flat_index_round_trip() {
        let counts = [2, 3, 4];
        for (i, y) in profiles(&counts).enumerate() {
            assert_eq!(flat_index(&counts, &y), i);
        }
        assert_eq!(profile_at(&counts, 1), vec![0, 0, 1]);
    }
}
