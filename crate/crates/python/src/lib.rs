//! Python bindings.
//!
//! Profiles cross the boundary as flat lists of reduced coordinates, player
//! by player, as in the CLI. Structured results (equilibria, certificates,
//! event logs, batch summaries) come back as plain dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use fictplay::batch::{run_batch, write_batch_summary, BatchConfig};
use fictplay::io::{equilibria_json, event_log_json, trajectory_csv, CertificateJson, GameFile};
use fictplay::{
    check_exact_potential, enumerate_equilibria, extract_potential, fit_decay, rate_certificate,
    sample_potential_game, simulate_fp, verify_bound, FpOptions, Game, Metric, Tolerances,
    TrajectoryStatus, XProfile,
};

create_exception!(pyfictplay, NotPotentialGameError, PyValueError);

fn to_py_err(e: fictplay::Error) -> PyErr {
    match e {
        fictplay::Error::NotPotentialGame { .. } => NotPotentialGameError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_metric(metric: &str) -> PyResult<Metric> {
    metric.parse().map_err(|e: String| PyValueError::new_err(e))
}

/// Converts JSON text to Python objects with the standard `json` module.
fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &text)
}

#[pyclass(name = "PotentialGame", module = "pyfictplay", frozen)]
struct PyPotentialGame {
    inner: fictplay::PotentialGame,
}

impl PyPotentialGame {
    fn profile(&self, flat: &[f64]) -> PyResult<XProfile> {
        XProfile::from_flat(self.inner.action_counts(), flat, Tolerances::default().polytope)
            .map_err(to_py_err)
    }
}

#[pymethods]
impl PyPotentialGame {
    /// Common-interest game with every player's utility equal to `potential`.
    #[new]
    fn new(actions: Vec<usize>, potential: Vec<f64>) -> PyResult<Self> {
        let inner = fictplay::PotentialGame::common_interest(actions, potential).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Samples a random exact potential game.
    #[staticmethod]
    fn sample(actions: Vec<usize>, seed: u64) -> PyResult<Self> {
        let inner = sample_potential_game(&actions, seed).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Builds a game from per-player utility tables and extracts its
    /// potential. Raises `NotPotentialGameError` when none exists.
    #[staticmethod]
    #[pyo3(signature = (actions, utilities, tol = 1e-9))]
    fn extract(actions: Vec<usize>, utilities: Vec<Vec<f64>>, tol: f64) -> PyResult<Self> {
        let game = Game::new(actions, utilities).map_err(to_py_err)?;
        let inner = extract_potential(&game, tol).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file = GameFile::from_json(text).map_err(to_py_err)?;
        let inner = file.to_potential_game(&Tolerances::default()).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        GameFile::from_potential_game(&self.inner).to_json()
    }

    #[getter]
    fn actions(&self) -> Vec<usize> {
        self.inner.action_counts().to_vec()
    }

    #[getter]
    fn n_players(&self) -> usize {
        self.inner.n_players()
    }

    #[getter]
    fn potential(&self) -> Vec<f64> {
        self.inner.potential().to_vec()
    }

    #[getter]
    fn utilities(&self) -> Vec<Vec<f64>> {
        self.inner.game().utilities().to_vec()
    }

    fn expected_potential(&self, x: Vec<f64>) -> PyResult<f64> {
        let x = self.profile(&x)?;
        self.inner
            .expected_potential(&x, Tolerances::default().polytope)
            .map_err(to_py_err)
    }

    /// Pure best responses of every player at `x`, 0-based.
    #[pyo3(signature = (x, tie_tol = 1e-9))]
    fn best_responses(&self, x: Vec<f64>, tie_tol: f64) -> PyResult<Vec<Vec<usize>>> {
        let x = self.profile(&x)?;
        Ok(fictplay::best_response_set(&self.inner, &x, tie_tol)
            .map_err(to_py_err)?
            .per_player)
    }

    fn is_nash(&self, x: Vec<f64>) -> PyResult<bool> {
        let x = self.profile(&x)?;
        fictplay::is_nash(&self.inner, &x, Tolerances::default().equilibrium).map_err(to_py_err)
    }

    /// Every equilibrium found by support enumeration, as dicts with 1-based
    /// supports.
    fn equilibria<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let eqs = enumerate_equilibria(&self.inner, &Tolerances::default()).map_err(to_py_err)?;
        json_to_py(py, &equilibria_json(&eqs))
    }

    #[pyo3(signature = (x0, horizon = 50.0))]
    fn simulate(&self, x0: Vec<f64>, horizon: f64) -> PyResult<PyTrajectory> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(PyValueError::new_err("horizon must be positive"));
        }
        let x0 = self.profile(&x0)?;
        let opts = FpOptions {
            horizon,
            ..FpOptions::default()
        };
        let inner = simulate_fp(&self.inner, &x0, &opts).map_err(to_py_err)?;
        Ok(PyTrajectory {
            game: self.inner.clone(),
            inner,
        })
    }

    fn __repr__(&self) -> String {
        format!("PotentialGame(actions={:?})", self.inner.action_counts())
    }
}

#[pyclass(name = "Trajectory", module = "pyfictplay", frozen)]
struct PyTrajectory {
    game: fictplay::PotentialGame,
    inner: fictplay::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    /// `"Converged"`, `"MixedEquilibriumReached"` or `"HorizonReached"`.
    #[getter]
    fn status(&self) -> String {
        format!("{:?}", self.inner.status)
    }

    #[getter]
    fn end_time(&self) -> f64 {
        self.inner.end_time
    }

    #[getter]
    fn n_segments(&self) -> usize {
        self.inner.segments.len()
    }

    /// Switch events as `(time, player, leaving, entering)`, 0-based.
    #[getter]
    fn events(&self) -> Vec<(f64, usize, Vec<usize>, Vec<usize>)> {
        self.inner
            .events
            .iter()
            .map(|e| (e.time, e.player, e.leaving.clone(), e.entering.clone()))
            .collect()
    }

    #[getter]
    fn limit(&self) -> Option<Vec<f64>> {
        self.inner.limit.as_ref().map(|x| x.flat())
    }

    fn state_at(&self, t: f64) -> Vec<f64> {
        self.inner.state_at(t).flat()
    }

    fn event_log<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &event_log_json(&self.inner))
    }

    #[pyo3(signature = (per_segment = 200, metric = "euclidean"))]
    fn to_csv(&self, per_segment: usize, metric: &str) -> PyResult<String> {
        let eqs = enumerate_equilibria(&self.game, &Tolerances::default()).map_err(to_py_err)?;
        trajectory_csv(&self.game, &self.inner, &eqs, parse_metric(metric)?, per_segment).map_err(to_py_err)
    }

    /// The rate certificate with its bound check. For runs that did not
    /// converge every certificate field is `None`.
    #[pyo3(signature = (metric = "euclidean", tol = 1e-9))]
    fn certificate<'py>(&self, py: Python<'py>, metric: &str, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let metric = parse_metric(metric)?;
        let doc = if self.inner.status == TrajectoryStatus::Converged {
            let cert = rate_certificate(&self.inner, &self.game, metric).map_err(to_py_err)?;
            let eqs = enumerate_equilibria(&self.game, &Tolerances::default()).map_err(to_py_err)?;
            let bound = verify_bound(&self.inner, &cert, &eqs, tol).map_err(to_py_err)?;
            CertificateJson::new(self.inner.status, Some(&cert), Some(bound), metric)
        } else {
            CertificateJson::new(self.inner.status, None, None, metric)
        };
        json_to_py(py, &doc.to_json())
    }

    /// Log-linear fit of the distance to the limit from `t_from` on.
    #[pyo3(signature = (t_from = 0.0, metric = "euclidean"))]
    fn fit_decay<'py>(&self, py: Python<'py>, t_from: f64, metric: &str) -> PyResult<Bound<'py, PyAny>> {
        let fit = fit_decay(&self.inner, t_from, parse_metric(metric)?);
        to_py(py, &fit)
    }
}

/// Checks whether `potential` is an exact potential for the game given by
/// `actions` and `utilities`. Returns `(ok, max_violation)`.
#[pyfunction]
#[pyo3(signature = (actions, utilities, potential, tol = 1e-9))]
fn check_potential(
    actions: Vec<usize>,
    utilities: Vec<Vec<f64>>,
    potential: Vec<f64>,
    tol: f64,
) -> PyResult<(bool, f64)> {
    let game = Game::new(actions, utilities).map_err(to_py_err)?;
    let check = check_exact_potential(&game, &potential, tol).map_err(to_py_err)?;
    Ok((check.ok, check.max_violation))
}

/// Runs the seeded batch experiment and returns its summary.
#[pyfunction]
#[pyo3(signature = (seed, n_games = 100, n_inits = 20, actions = None, horizon = 50.0, threads = None))]
fn batch<'py>(
    py: Python<'py>,
    seed: u64,
    n_games: usize,
    n_inits: usize,
    actions: Option<Vec<usize>>,
    horizon: f64,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut config = BatchConfig {
        n_games,
        n_inits,
        seed,
        fp: FpOptions {
            horizon,
            ..FpOptions::default()
        },
        threads,
        ..BatchConfig::default()
    };
    if let Some(shape) = actions {
        config.shapes = vec![shape];
    }
    let reports = py.detach(|| run_batch(&config)).map_err(to_py_err)?;
    to_py(py, &write_batch_summary(&reports))
}

#[pymodule]
fn pyfictplay(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPotentialGame>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(check_potential, m)?)?;
    m.add_function(wrap_pyfunction!(batch, m)?)?;
    m.add("NotPotentialGameError", m.py().get_type::<NotPotentialGameError>())?;
    let defaults = PyDict::new(m.py());
    defaults.set_item("horizon", FpOptions::default().horizon)?;
    defaults.set_item("tie_tol", Tolerances::default().tie)?;
    m.add("DEFAULTS", defaults)?;
    Ok(())
}
