//! Python bindings for phasematch.

use num_complex::Complex64;
use phasematch::evolution::{self, MarkedFraction};
use phasematch::fit::{self, FitConfig, Objective};
use phasematch::schedule::PhaseSchedule as CoreSchedule;
use phasematch::{iteration, schemes, single_pair, statevector, two_pair, Error};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(
    pyphasematch,
    PhasematchError,
    PyValueError,
    "Invalid input to a phasematch routine."
);
create_exception!(
    pyphasematch,
    InfeasibleError,
    PhasematchError,
    "No solution exists for the request."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Infeasible(_) | Error::Degenerate(_) | Error::OutOfDomain(_) => InfeasibleError::new_err(e.to_string()),
        _ => PhasematchError::new_err(e.to_string()),
    }
}

type RootsAndMinima = (Vec<f64>, Vec<(f64, f64)>);

fn frac(lambda: f64) -> PyResult<MarkedFraction> {
    MarkedFraction::new(lambda).map_err(to_py)
}

/// Sequence of (alpha, beta) phase pairs applied in order.
#[pyclass(name = "PhaseSchedule", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySchedule {
    inner: CoreSchedule,
}

#[pymethods]
impl PySchedule {
    /// Build from oracle phases; `betas` defaults to the matching rule.
    #[new]
    #[pyo3(signature = (alphas, betas=None))]
    fn new(alphas: Vec<f64>, betas: Option<Vec<f64>>) -> PyResult<Self> {
        let inner = match betas {
            Some(b) => CoreSchedule::from_phases(&alphas, &b).map_err(to_py)?,
            None => {
                if alphas.iter().any(|a| !a.is_finite()) {
                    return Err(PhasematchError::new_err("phases must be finite"));
                }
                CoreSchedule::matched(&alphas)
            }
        };
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: CoreSchedule::from_json(text).map_err(to_py)?,
        })
    }

    /// The reference six-step schedule.
    #[staticmethod]
    fn reference() -> Self {
        Self {
            inner: fit::reference_schedule(),
        }
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn alphas(&self) -> Vec<f64> {
        self.inner.alphas()
    }

    #[getter]
    fn betas(&self) -> Vec<f64> {
        self.inner.betas()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "PhaseSchedule(alphas={:?}, betas={:?})",
            self.inner.alphas(),
            self.inner.betas()
        )
    }

    fn satisfies_matching_rule(&self) -> bool {
        self.inner.satisfies_matching_rule()
    }

    /// Final `(u, d)` amplitudes from the database state at `lambda`.
    fn amplitudes(&self, lambda: f64) -> PyResult<(Complex64, Complex64)> {
        let a = evolution::apply_schedule(&self.inner, frac(lambda)?);
        Ok((a.u, a.d))
    }

    fn success_probability(&self, lambda: f64) -> PyResult<f64> {
        Ok(evolution::apply_schedule(&self.inner, frac(lambda)?).success_probability())
    }

    /// `P_j(λ)` for every stage; `result[j - 1][i]` is stage `j` at `grid[i]`.
    fn profile(&self, py: Python<'_>, grid: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let p = py
            .detach(|| evolution::probability_profile(&self.inner, &grid))
            .map_err(to_py)?;
        Ok(p.stages)
    }

    /// `(unit_roots, [(lambda, P), ...])` of the final stage on `[lo, hi]`.
    #[pyo3(signature = (lo=0.0, hi=1.0))]
    fn roots_and_minima(&self, py: Python<'_>, lo: f64, hi: f64) -> PyResult<RootsAndMinima> {
        let l = py
            .detach(|| fit::unit_roots_and_minima(&self.inner, (lo, hi)))
            .map_err(to_py)?;
        Ok((l.unit_roots, l.local_minima))
    }

    /// Largest deviation from a full `n`-qubit simulation with the given marked indices.
    fn cross_check(&self, n: u32, marked: Vec<usize>) -> PyResult<f64> {
        let m = statevector::MarkedSet::new(n, marked).map_err(to_py)?;
        let r = statevector::cross_check(&self.inner, &m).map_err(to_py)?;
        Ok(r.max_gap.max(r.marked_spread).max(r.unmarked_spread))
    }
}

/// Outcome of `fit_schedule`.
#[pyclass(name = "FitReport", frozen, get_all)]
struct PyFitReport {
    alphas: Vec<f64>,
    canonical_alphas: Vec<f64>,
    objective_value: f64,
    unit_roots: Vec<f64>,
    local_minima: Vec<(f64, f64)>,
    converged: bool,
}

#[pymethods]
impl PyFitReport {
    fn schedule(&self) -> PySchedule {
        PySchedule {
            inner: CoreSchedule::matched(&self.alphas),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "FitReport(alphas={:?}, objective_value={}, converged={})",
            self.alphas, self.objective_value, self.converged
        )
    }
}

/// Fit `k` matched phases so that `P_k ≈ 1` on `grid` (default 512 points on [0.1, 1]).
#[pyfunction]
#[pyo3(signature = (k, seed=0, grid=None, restarts=32, objective="squares"))]
fn fit_schedule(
    py: Python<'_>,
    k: usize,
    seed: u64,
    grid: Option<Vec<f64>>,
    restarts: usize,
    objective: &str,
) -> PyResult<PyFitReport> {
    let objective = match objective {
        "squares" => Objective::SumOfSquares,
        "absolute" => Objective::SumOfAbsolute,
        other => return Err(PhasematchError::new_err(format!("unknown objective '{other}'"))),
    };
    let mut config = FitConfig::new(k, seed)
        .with_restarts(restarts)
        .with_objective(objective);
    if let Some(g) = grid {
        config = config.with_grid(g);
    }
    let r = py.detach(|| fit::fit_schedule(&config)).map_err(to_py)?;
    Ok(PyFitReport {
        alphas: r.alphas,
        canonical_alphas: r.canonical_alphas,
        objective_value: r.objective_value,
        unit_roots: r.unit_roots,
        local_minima: r.local_minima,
        converged: r.converged,
    })
}

#[pyfunction]
fn single_step_probability(lambda: f64, alpha: f64) -> PyResult<f64> {
    Ok(single_pair::single_step_probability(frac(lambda)?, alpha))
}

/// `α ∈ [0, π]` with one matched step succeeding exactly at `lambda >= 1/4`.
#[pyfunction]
fn matched_phase_for_unity(lambda: f64) -> PyResult<f64> {
    single_pair::matched_phase_for_unity(frac(lambda)?).map_err(to_py)
}

/// All `(alpha1, alpha2)` whose two matched steps succeed at both fractions.
#[pyfunction]
fn solve_two_phases(lambda1: f64, lambda2: f64) -> PyResult<Vec<(f64, f64)>> {
    let sols = two_pair::solve_phases_for_roots(frac(lambda1)?, frac(lambda2)?).map_err(to_py)?;
    Ok(sols.into_iter().map(|s| (s.alpha1, s.alpha2)).collect())
}

#[pyfunction]
fn unity_roots_single_phase(alpha: f64, k: u32) -> PyResult<Vec<f64>> {
    iteration::unity_roots_single_phase(alpha, k).map_err(to_py)
}

#[pyfunction]
fn grover_probability(lambda: f64, k: u32) -> PyResult<f64> {
    Ok(iteration::grover_probability(frac(lambda)?, k))
}

#[pyfunction]
fn optimal_iterations(lambda: f64) -> PyResult<u64> {
    Ok(iteration::optimal_iterations(frac(lambda)?).map_err(to_py)?.rounded)
}

#[pyfunction]
fn p_min_envelope(lambda: f64, alpha: f64) -> PyResult<f64> {
    Ok(iteration::p_min_envelope(frac(lambda)?, alpha).value)
}

#[pyfunction]
fn long_matched_lambda(theta: f64) -> PyResult<f64> {
    Ok(schemes::long_matched_lambda(theta).map_err(to_py)?.lambda)
}

/// `(exact, approximation)` for `k` classical draws of `marked` among `total`.
#[pyfunction]
fn classical_probability(marked: u64, total: u64, k: u64) -> PyResult<(f64, f64)> {
    let c = schemes::classical_probability(marked, total, k).map_err(to_py)?;
    Ok((c.exact, c.approximation))
}

/// Phase-matched Grover search on the marked/unmarked plane.
#[pymodule]
fn pyphasematch(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchedule>()?;
    m.add_class::<PyFitReport>()?;
    m.add("PhasematchError", m.py().get_type::<PhasematchError>())?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_function(wrap_pyfunction!(fit_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(single_step_probability, m)?)?;
    m.add_function(wrap_pyfunction!(matched_phase_for_unity, m)?)?;
    m.add_function(wrap_pyfunction!(solve_two_phases, m)?)?;
    m.add_function(wrap_pyfunction!(unity_roots_single_phase, m)?)?;
    m.add_function(wrap_pyfunction!(grover_probability, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_iterations, m)?)?;
    m.add_function(wrap_pyfunction!(p_min_envelope, m)?)?;
    m.add_function(wrap_pyfunction!(long_matched_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(classical_probability, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_defaults_to_matching_rule() {
        let s = PySchedule::new(vec![1.0, 2.0], None).unwrap();
        assert!(s.satisfies_matching_rule());
        assert_eq!(s.betas(), vec![-2.0, -1.0]);
    }

    #[test]
    fn quarter_fraction_succeeds() {
        let s = PySchedule::new(vec![std::f64::consts::PI], None).unwrap();
        assert!((s.success_probability(0.25).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_pair() {
        let sols = solve_two_phases(0.4, 0.8).unwrap();
        assert!((sols[0].0 - 1.00889485).abs() < 1e-6);
    }
}
