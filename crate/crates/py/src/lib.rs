//! Python module `expburgers`.

use std::path::PathBuf;

use burgers_core::analysis::{self, ErrorReport, MaxEntry, SearchResult};
use burgers_core::basis::{self, NodalWeights};
use burgers_core::harness;
use burgers_core::init::CoefficientState;
use burgers_core::problems::{self, ProblemSpec};
use burgers_core::stepper;
use burgers_core::{BurgersError, SplineParams};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(expburgers, SolverError, PyRuntimeError);

fn to_py(err: BurgersError) -> PyErr {
    match err {
        BurgersError::Singular { .. } => SolverError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

#[pyclass(name = "SplineParams", module = "expburgers", frozen)]
struct PySplineParams {
    inner: SplineParams,
}

#[pymethods]
impl PySplineParams {
    #[new]
    fn new(a: f64, b: f64, n: usize, p: f64) -> PyResult<Self> {
        Ok(Self {
            inner: SplineParams::new(a, b, n, p).map_err(to_py)?,
        })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h()
    }

    fn knots(&self) -> Vec<f64> {
        self.inner.knots()
    }

    fn __repr__(&self) -> String {
        format!(
            "SplineParams(a={}, b={}, n={}, p={})",
            self.inner.a(),
            self.inner.b(),
            self.inner.n(),
            self.inner.p()
        )
    }
}

#[pyclass(name = "Problem", module = "expburgers", frozen)]
struct PyProblem {
    inner: ProblemSpec,
}

#[pymethods]
impl PyProblem {
    #[staticmethod]
    #[pyo3(signature = (k1 = -2.0, k2 = 1.0, k3 = 1.0))]
    fn problem1(k1: f64, k2: f64, k3: f64) -> Self {
        Self {
            inner: problems::problem1_with(k1, k2, k3),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (k2 = 1.0, k3 = 0.3))]
    fn problem2(k2: f64, k3: f64) -> PyResult<Self> {
        Ok(Self {
            inner: problems::problem2(k2, k3).map_err(to_py)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (k1 = 2.0, k2 = 10.0, k3 = 10.0))]
    fn problem3(k1: f64, k2: f64, k3: f64) -> Self {
        Self {
            inner: problems::problem3(k1, k2, k3),
        }
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn constants(&self) -> (f64, f64, f64) {
        (self.inner.k1, self.inner.k2, self.inner.k3)
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        (self.inner.a, self.inner.b)
    }

    #[getter]
    fn has_exact(&self) -> bool {
        self.inner.exact.is_some()
    }

    /// Exact `(U, V)` at `(x, t)`, or `None`.
    fn exact(&self, x: f64, t: f64) -> Option<(f64, f64)> {
        self.inner
            .exact
            .as_ref()
            .map(|e| ((e.u)(x, t), (e.v)(x, t)))
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// Coefficients of both fields at one time level, tied to their grid.
#[pyclass(name = "State", module = "expburgers", frozen)]
struct PyState {
    inner: CoefficientState,
    params: SplineParams,
}

impl PyState {
    fn weights(&self) -> NodalWeights {
        basis::nodal_weights(&self.params)
    }
}

#[pymethods]
impl PyState {
    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    #[getter]
    fn delta(&self) -> Vec<f64> {
        self.inner.delta.clone()
    }

    #[getter]
    fn phi(&self) -> Vec<f64> {
        self.inner.phi.clone()
    }

    fn nodal_u(&self) -> Vec<f64> {
        self.inner.nodal_u(&self.weights())
    }

    fn nodal_v(&self) -> Vec<f64> {
        self.inner.nodal_v(&self.weights())
    }

    /// `(U, U_x, U_xx)` at `x`.
    fn eval_u(&self, x: f64) -> (f64, f64, f64) {
        let v = self.inner.eval_u(x, &self.params);
        (v.value, v.d1, v.d2)
    }

    fn eval_v(&self, x: f64) -> (f64, f64, f64) {
        let v = self.inner.eval_v(x, &self.params);
        (v.value, v.d1, v.d2)
    }

    fn __repr__(&self) -> String {
        format!("State(t={}, n={})", self.inner.t, self.inner.n())
    }
}

fn report_dict<'py>(py: Python<'py>, e: &ErrorReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("linf_u", e.linf_u)?;
    d.set_item("linf_v", e.linf_v)?;
    d.set_item("argmax_x_u", e.argmax_x_u)?;
    d.set_item("argmax_x_v", e.argmax_x_v)?;
    d.set_item("n", e.n)?;
    d.set_item("dt", e.dt)?;
    d.set_item("p", e.p)?;
    d.set_item("t", e.t)?;
    Ok(d)
}

fn maxima_dict<'py>(py: Python<'py>, m: &MaxEntry) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", m.t)?;
    d.set_item("max_u", m.max_u)?;
    d.set_item("x_u", m.x_u)?;
    d.set_item("max_v", m.max_v)?;
    d.set_item("x_v", m.x_v)?;
    Ok(d)
}

/// `alpha1, alpha2, beta_l, beta_r, gamma1, gamma2` as a dict.
#[pyfunction]
fn nodal_weights<'py>(py: Python<'py>, params: &PySplineParams) -> PyResult<Bound<'py, PyDict>> {
    let w = basis::nodal_weights(&params.inner);
    let d = PyDict::new(py);
    d.set_item("alpha1", w.alpha1)?;
    d.set_item("alpha2", w.alpha2)?;
    d.set_item("beta_l", w.beta_l)?;
    d.set_item("beta_r", w.beta_r)?;
    d.set_item("gamma1", w.gamma1)?;
    d.set_item("gamma2", w.gamma2)?;
    Ok(d)
}

/// `(B_i, B_i', B_i'')` at `x`.
#[pyfunction]
fn eval_basis(i: isize, x: f64, params: &PySplineParams) -> (f64, f64, f64) {
    let sp = &params.inner;
    (
        basis::eval_basis(i, x, sp),
        basis::eval_basis_d1(i, x, sp),
        basis::eval_basis_d2(i, x, sp),
    )
}

#[pyfunction]
fn fit_initial(problem: &PyProblem, params: &PySplineParams) -> PyResult<PyState> {
    let st = burgers_core::fit_initial(&problem.inner, &params.inner).map_err(to_py)?;
    Ok(PyState {
        inner: st,
        params: params.inner,
    })
}

/// Steps to `t_final`; returns the final state and one state per snapshot time.
#[pyfunction]
#[pyo3(signature = (problem, params, dt, t_final, snapshots = Vec::new()))]
fn run(
    py: Python<'_>,
    problem: &PyProblem,
    params: &PySplineParams,
    dt: f64,
    t_final: f64,
    snapshots: Vec<f64>,
) -> PyResult<(PyState, Vec<PyState>)> {
    let (pr, sp) = (&problem.inner, &params.inner);
    let out = py
        .detach(|| stepper::run(pr, sp, dt, t_final, &snapshots))
        .map_err(to_py)?;
    let wrap = |s: CoefficientState| PyState {
        inner: s,
        params: *sp,
    };
    Ok((
        wrap(out.final_state),
        out.snapshots.into_iter().map(wrap).collect(),
    ))
}

#[pyfunction]
fn linf_error<'py>(
    py: Python<'py>,
    state: &PyState,
    problem: &PyProblem,
    dt: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let e = analysis::linf_error(&state.inner, &problem.inner, &state.params, dt).map_err(to_py)?;
    report_dict(py, &e)
}

#[pyfunction]
fn convergence_order(e_coarse: f64, e_fine: f64, n_coarse: usize, n_fine: usize) -> PyResult<f64> {
    analysis::convergence_order(e_coarse, e_fine, n_coarse, n_fine).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (problem, n, dt, t_final, p_lo = 1e-8, p_hi = 10.0))]
fn search_p<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    n: usize,
    dt: f64,
    t_final: f64,
    p_lo: f64,
    p_hi: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let pr = &problem.inner;
    let res: SearchResult = py
        .detach(|| analysis::search_p(pr, n, dt, t_final, p_lo, p_hi))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("best_p", res.best_p)?;
    d.set_item("best_value", res.best_value)?;
    d.set_item("evaluations", res.evaluations)?;
    d.set_item("skipped", res.skipped)?;
    Ok(d)
}

#[pyfunction]
fn track_maxima<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    params: &PySplineParams,
    dt: f64,
    times: Vec<f64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let (pr, sp) = (&problem.inner, &params.inner);
    let report = py
        .detach(|| analysis::track_maxima(pr, sp, dt, &times))
        .map_err(to_py)?;
    report.entries.iter().map(|m| maxima_dict(py, m)).collect()
}

/// Runs a config text as the command-line tool would; returns the written paths.
#[pyfunction]
fn run_config(py: Python<'_>, text: &str, out_dir: PathBuf) -> PyResult<Vec<PathBuf>> {
    let cfg = harness::parse_config(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let outcome = py
        .detach(|| harness::run_experiment(&cfg, &out_dir))
        .map_err(|e| match e {
            harness::HarnessError::Config(c) => PyValueError::new_err(c.to_string()),
            other => SolverError::new_err(other.to_string()),
        })?;
    Ok(outcome.files)
}

#[pymodule]
fn expburgers(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add_class::<PySplineParams>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(nodal_weights, m)?)?;
    m.add_function(wrap_pyfunction!(eval_basis, m)?)?;
    m.add_function(wrap_pyfunction!(fit_initial, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(linf_error, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_order, m)?)?;
    m.add_function(wrap_pyfunction!(search_p, m)?)?;
    m.add_function(wrap_pyfunction!(track_maxima, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
