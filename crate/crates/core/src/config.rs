use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
///
/// Defaults follow the values each operation documents; every field can be
/// overridden from the CLI or the Python bindings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Slack allowed on simplex and polytope membership.
    pub polytope: f64,
    /// Exact-potential identity check.
    pub potential: f64,
    /// Two payoffs closer than this are tied for the best response.
    pub tie: f64,
    /// Maximum deviation gain accepted by `is_nash`.
    pub equilibrium: f64,
    /// Weights at or below this are outside the support.
    pub support: f64,
    /// Linear-system residual above which a support candidate is dropped.
    pub residual: f64,
    /// Largest condition number of a nonsingular support Hessian.
    pub max_condition: f64,
    /// Event localisation accuracy in time units.
    pub time: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            polytope: 1e-12,
            potential: 1e-9,
            tie: 1e-9,
            equilibrium: 1e-9,
            support: 1e-10,
            residual: 1e-8,
            max_condition: 1e10,
            time: 1e-12,
        }
    }
}

/// Distance used for `d(x, NE)` on the reduced coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Sup,
}

impl Metric {
    pub fn norm(self, v: impl IntoIterator<Item = f64>) -> f64 {
        match self {
            Metric::Euclidean => v.into_iter().map(|a| a * a).sum::<f64>().sqrt(),
            Metric::Sup => v.into_iter().fold(0.0, |m, a| m.max(a.abs())),
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        self.norm(a.iter().zip(b).map(|(p, q)| p - q))
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "sup" => Ok(Metric::Sup),
            other => Err(format!("unknown metric `{other}` (expected euclidean or sup)")),
        }
    }
}
