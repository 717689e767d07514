//! Python bindings: `import qthermo`.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qthermo_core::dynamics::{self, DispersiveParams, Frame, LindbladParams, TimeGrid};
use qthermo_core::linalg::{self, ComplexMatrix, Subsystem, C64};
use qthermo_core::scenario::output::{render_csv, render_json, Row};
use qthermo_core::scenario::{self, ScenarioConfig, ScenarioKind};
use qthermo_core::states;
use qthermo_core::Error;

fn to_py(e: Error) -> PyErr {
    if e.exit_code() == 2 {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn matrix_from_rows(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(to_py)
}

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m[(i, j)]).collect()).collect()
}

/// Validated density matrix (dimension 2 or 4).
#[pyclass(name = "DensityMatrix", module = "qthermo", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: states::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        let m = matrix_from_rows(rows)?;
        Ok(PyDensityMatrix { inner: states::validate_density(&m).map_err(to_py)? })
    }

    /// `[[p, c], [conj(c), 1 - p]]`
    #[staticmethod]
    fn qubit(p: f64, c: C64) -> PyResult<Self> {
        Ok(PyDensityMatrix { inner: states::DensityMatrix::qubit(p, c).map_err(to_py)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Eigenvalues in descending order.
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues().to_vec()
    }

    fn entropy(&self) -> f64 {
        states::von_neumann_entropy(&self.inner)
    }

    fn to_list(&self) -> Vec<Vec<C64>> {
        matrix_to_rows(self.inner.matrix())
    }

    /// Reduced state of subsystem `keep` ("A" or "B") of a two-qubit state.
    fn partial_trace(&self, keep: &str) -> PyResult<Self> {
        let keep = match keep {
            "A" | "a" => Subsystem::A,
            "B" | "b" => Subsystem::B,
            other => return Err(PyValueError::new_err(format!("keep must be 'A' or 'B', got {other:?}"))),
        };
        let m = linalg::partial_trace(self.inner.matrix(), keep).map_err(to_py)?;
        Ok(PyDensityMatrix { inner: states::validate_density(&m).map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix({:?})", self.to_list())
    }
}

/// Heat/work/entropy ledger, one row per time sample.
#[pyclass(name = "Ledger", module = "qthermo", frozen)]
struct PyLedger {
    inner: qthermo_core::ThermoLedger,
}

#[pymethods]
impl PyLedger {
    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }

    /// Column name -> list of values, using the CSV column names.
    fn columns<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let rows: Vec<Row> = self.inner.samples.iter().map(Row::from).collect();
        let dict = PyDict::new(py);
        type Column = (&'static str, fn(&Row) -> f64);
        let cols: [Column; 13] = [
            ("t", |r| r.t),
            ("p1", |r| r.p1),
            ("p2", |r| r.p2),
            ("U", |r| r.u),
            ("S", |r| r.s),
            ("dQ_new", |r| r.dq_new),
            ("dW_new", |r| r.dw_new),
            ("Q_new", |r| r.q_new),
            ("W_new", |r| r.w_new),
            ("Q_alicki", |r| r.q_alicki),
            ("W_alicki", |r| r.w_alicki),
            ("residual_new", |r| r.residual_new),
            ("residual_alicki", |r| r.residual_alicki),
        ];
        for (name, get) in cols {
            dict.set_item(name, rows.iter().map(get).collect::<Vec<_>>())?;
        }
        Ok(dict)
    }

    fn to_csv(&self) -> String {
        render_csv(&self.inner)
    }

    fn to_json(&self) -> String {
        render_json(&self.inner)
    }
}

/// Result of a scenario run.
#[pyclass(name = "RunResult", module = "qthermo", frozen)]
struct PyRunResult {
    #[pyo3(get)]
    ledger: Py<PyLedger>,
    #[pyo3(get)]
    ledger_b: Option<Py<PyLedger>>,
    #[pyo3(get)]
    flags: Vec<String>,
    #[pyo3(get)]
    metrics: BTreeMap<String, f64>,
    states: Vec<states::DensityMatrix>,
}

#[pymethods]
impl PyRunResult {
    /// Reduced state of the tracked qubit at every time sample.
    fn states(&self) -> Vec<PyDensityMatrix> {
        self.states.iter().map(|s| PyDensityMatrix { inner: s.clone() }).collect()
    }
}

fn kwarg_string(value: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(b) = value.extract::<bool>() {
        return Ok(b.to_string());
    }
    if let Ok(n) = value.extract::<i64>() {
        return Ok(n.to_string());
    }
    if let Ok(x) = value.extract::<f64>() {
        return Ok(format!("{x:?}"));
    }
    if let Ok(z) = value.extract::<C64>() {
        return Ok(format!("{:?}{:+?}i", z.re, z.im));
    }
    Ok(value.str()?.to_string())
}

/// Runs `scenario` ("two-qubit" or "dissipative"); keyword arguments use the
/// CLI flag names (`p`, `c`, `g`, `omega0`, `gamma`, `nbar`, `t_max`, `steps`,
/// `frame`, `crosscheck`, ...).
#[pyfunction]
#[pyo3(signature = (scenario, **kwargs))]
fn run(py: Python<'_>, scenario: &str, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<PyRunResult> {
    let kind: ScenarioKind = scenario.parse().map_err(to_py)?;
    let mut pairs = BTreeMap::new();
    if let Some(kwargs) = kwargs {
        for (k, v) in kwargs.iter() {
            pairs.insert(k.extract::<String>()?, kwarg_string(&v)?);
        }
    }
    let cfg = ScenarioConfig::from_pairs(kind, &pairs).map_err(to_py)?;
    let out = py.detach(|| scenario::run(&cfg)).map_err(to_py)?;
    Ok(PyRunResult {
        ledger: Py::new(py, PyLedger { inner: out.ledger })?,
        ledger_b: out.ledger_b.map(|b| Py::new(py, PyLedger { inner: b })).transpose()?,
        flags: out.summary.flags.clone(),
        metrics: out.summary.metrics.clone(),
        states: out.states,
    })
}

fn parse_frame(frame: &str) -> PyResult<Frame> {
    frame.parse().map_err(to_py)
}

/// Closed-form reduced state of qubit A under the dispersive coupling.
#[pyfunction]
#[pyo3(signature = (p, c, g, t, omega0 = 1.0, frame = "interaction"))]
fn dispersive_reduced_a(p: f64, c: C64, g: f64, t: f64, omega0: f64, frame: &str) -> PyResult<PyDensityMatrix> {
    let params = DispersiveParams { omega0, g, p, c, frame: parse_frame(frame)? };
    params.validate().map_err(to_py)?;
    Ok(PyDensityMatrix { inner: dynamics::dispersive_reduced_a(&params, t).map_err(to_py)? })
}

fn lindblad(gamma: f64, nbar: f64, omega0: f64) -> PyResult<LindbladParams> {
    let params = LindbladParams { gamma, nbar, omega0 };
    params.validate().map_err(to_py)?;
    Ok(params)
}

/// Exact damped-qubit state at time `t`.
#[pyfunction]
#[pyo3(signature = (rho0, t, gamma = 1.0, nbar = 0.0, omega0 = 1.0))]
fn lindblad_analytic(rho0: &PyDensityMatrix, t: f64, gamma: f64, nbar: f64, omega0: f64) -> PyResult<PyDensityMatrix> {
    let params = lindblad(gamma, nbar, omega0)?;
    Ok(PyDensityMatrix { inner: dynamics::lindblad_analytic(&params, &rho0.inner, t).map_err(to_py)? })
}

/// RK4 trajectory on `steps` equal intervals of `[0, t_max]`.
#[pyfunction]
#[pyo3(signature = (rho0, t_max, steps, gamma = 1.0, nbar = 0.0, omega0 = 1.0))]
fn rk4_evolve(
    py: Python<'_>,
    rho0: &PyDensityMatrix,
    t_max: f64,
    steps: usize,
    gamma: f64,
    nbar: f64,
    omega0: f64,
) -> PyResult<Vec<PyDensityMatrix>> {
    let params = lindblad(gamma, nbar, omega0)?;
    let grid = TimeGrid::new(t_max, steps).map_err(to_py)?;
    let rho0 = rho0.inner.clone();
    let traj = py.detach(|| dynamics::rk4_evolve(&params, &rho0, &grid)).map_err(to_py)?;
    Ok(traj.into_iter().map(|inner| PyDensityMatrix { inner }).collect())
}

#[pyfunction]
fn von_neumann_entropy(rho: &PyDensityMatrix) -> f64 {
    states::von_neumann_entropy(&rho.inner)
}

/// `(x, y, z, r)` of a qubit state.
#[pyfunction]
fn bloch_vector(rho: &PyDensityMatrix) -> PyResult<(f64, f64, f64, f64)> {
    let b = states::bloch_vector(&rho.inner).map_err(to_py)?;
    Ok((b.x, b.y, b.z, b.r))
}

#[pyfunction]
fn tensor_product(a: &PyDensityMatrix, b: &PyDensityMatrix) -> PyResult<PyDensityMatrix> {
    let m = linalg::tensor_product(a.inner.matrix(), b.inner.matrix()).map_err(to_py)?;
    Ok(PyDensityMatrix { inner: states::validate_density(&m).map_err(to_py)? })
}

#[pymodule]
fn qthermo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyLedger>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(dispersive_reduced_a, m)?)?;
    m.add_function(wrap_pyfunction!(lindblad_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(rk4_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_vector, m)?)?;
    m.add_function(wrap_pyfunction!(tensor_product, m)?)?;
    Ok(())
}
