//! Python bindings for `dualfem`.
//!
//! Problem definitions cross the boundary as JSON strings in the same schema
//! the CLI config uses, so profiles and boundary selections need no separate
//! Python wrappers.

use dualfem::dual_euler::{self, EulerConfig};
use dualfem::dual_heat::{self, HeatProblem};
use dualfem::dual_transport::{self, StagePlan, TransportProblem};
use dualfem::{metrics, oracles, Error};
use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(err: Error) -> PyErr {
    match err.root() {
        Error::InvalidArgument(_) => PyValueError::new_err(err.to_string()),
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

fn parse<T: serde::de::DeserializeOwned>(json: &str) -> PyResult<T> {
    serde_json::from_str(json).map_err(|e| PyValueError::new_err(format!("bad problem JSON: {e}")))
}

#[pyclass(name = "SpaceTimeMesh", frozen)]
struct PyMesh {
    inner: dualfem::SpaceTimeMesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    fn new(length: f64, duration: f64, nx: usize, nt: usize) -> PyResult<Self> {
        Ok(PyMesh { inner: dualfem::SpaceTimeMesh::new(length, duration, nx, nt).map_err(to_py)? })
    }

    #[getter]
    fn nx(&self) -> usize {
        self.inner.nx()
    }

    #[getter]
    fn nt(&self) -> usize {
        self.inner.nt()
    }

    #[getter]
    fn hx(&self) -> f64 {
        self.inner.hx()
    }

    #[getter]
    fn ht(&self) -> f64 {
        self.inner.ht()
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    /// `(x, t)` of every node, row by row in time.
    fn nodes(&self) -> Vec<(f64, f64)> {
        self.inner.nodes().iter().map(|p| (p[0], p[1])).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SpaceTimeMesh(length={}, duration={}, nx={}, nt={})",
            self.inner.length(),
            self.inner.duration(),
            self.inner.nx(),
            self.inner.nt()
        )
    }
}

#[pyclass(name = "HeatSolution", frozen, get_all)]
struct PyHeatSolution {
    theta: Vec<f64>,
    p: Vec<f64>,
    l: Vec<f64>,
    relative_residual: f64,
}

/// Solves the dual heat problem on `mesh` and returns nodal fields.
#[pyfunction]
fn solve_heat(problem_json: &str, mesh: &PyMesh) -> PyResult<PyHeatSolution> {
    let problem: HeatProblem = parse(problem_json)?;
    let run = dual_heat::run_heat(&problem, &mesh.inner).map_err(to_py)?;
    Ok(PyHeatSolution {
        theta: run.theta.values,
        p: run.dual.p.values,
        l: run.dual.l.values,
        relative_residual: run.dual.relative_residual,
    })
}

/// Time-sliced transport solve; returns `(xs, times, values)` with
/// `values[level][i]`.
#[pyfunction]
fn solve_transport(
    problem_json: &str,
    nx: usize,
    nt_stage: usize,
    t_stage: f64,
    t_keep: f64,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    let problem: TransportProblem = parse(problem_json)?;
    let mesh = dualfem::SpaceTimeMesh::new(problem.length, t_stage, nx, nt_stage).map_err(to_py)?;
    let out = dual_transport::run_time_sliced(&problem, StagePlan { t_stage, t_keep }, &mesh).map_err(to_py)?;
    Ok((out.xs, out.times, out.values))
}

#[pyclass(name = "RigidBody", frozen)]
struct PyRigidBody {
    inner: dual_euler::RigidBody,
}

#[pymethods]
impl PyRigidBody {
    #[new]
    #[pyo3(signature = (inertia, nu = 0.0, a = 1.0))]
    fn new(inertia: [f64; 3], nu: f64, a: f64) -> PyResult<Self> {
        let inner = dual_euler::RigidBody { inertia, nu, a };
        inner.validate().map_err(to_py)?;
        Ok(PyRigidBody { inner })
    }

    #[getter]
    fn inertia(&self) -> [f64; 3] {
        self.inner.inertia
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.inner.nu
    }

    fn energy(&self, omega: [f64; 3]) -> f64 {
        self.inner.energy(omega)
    }

    fn momentum(&self, omega: [f64; 3]) -> f64 {
        self.inner.momentum(omega)
    }
}

/// Staged dual solve of Euler's equations; returns `(times, omega)`.
#[pyfunction]
#[pyo3(signature = (body, omega0, total_time, t_stage, ne_per_stage = 20, n_c = 5, tol = 1e-10, max_iter = 50))]
#[allow(clippy::too_many_arguments)]
fn solve_euler(
    body: &PyRigidBody,
    omega0: [f64; 3],
    total_time: f64,
    t_stage: f64,
    ne_per_stage: usize,
    n_c: usize,
    tol: f64,
    max_iter: usize,
) -> PyResult<(Vec<f64>, Vec<[f64; 3]>)> {
    let cfg = EulerConfig {
        body: body.inner,
        omega0,
        total_time,
        t_stage,
        ne_per_stage,
        n_c,
        tol,
        max_iter,
        lambda_t: [0.0; 3],
    };
    let run = dual_euler::run_euler(&cfg).map_err(to_py)?;
    Ok((run.times, run.omega))
}

#[pyfunction]
fn jacobi(u: f64, m: f64) -> (f64, f64, f64) {
    let j = oracles::jacobi(u, m);
    (j.sn, j.cn, j.dn)
}

#[pyfunction]
fn euler_free_exact(t: f64, inertia: [f64; 3], omega0: [f64; 3]) -> PyResult<[f64; 3]> {
    oracles::euler_free_exact(t, inertia, omega0).map_err(to_py)
}

/// RK45 reference for damped rotation sampled at `times`.
#[pyfunction]
fn rk45_reference(inertia: [f64; 3], omega0: [f64; 3], nu: f64, times: Vec<f64>) -> PyResult<Vec<[f64; 3]>> {
    let end = times.iter().cloned().fold(0.0, f64::max);
    if end <= 0.0 {
        return Ok(times.iter().map(|_| omega0).collect());
    }
    let dense = oracles::rk45_reference(inertia, omega0, nu, end).map_err(to_py)?;
    Ok(times.iter().map(|&t| dense.eval(t)).collect())
}

#[pyfunction]
fn heat_fourier_jump(x: f64, t: f64, beta: f64, eps: f64, k: f64, n_terms: usize) -> f64 {
    oracles::heat_fourier_jump(x, t, beta, eps, k, n_terms)
}

#[pyfunction]
fn heat_transient(x: f64, t: f64, k: f64) -> f64 {
    oracles::heat_transient(x, t, k)
}

#[pyfunction]
fn transport_exact(x: f64, t: f64) -> f64 {
    oracles::transport_exact(x, t)
}

/// Solves `Āx = b` through its dual; `None` when the system has no solution.
#[pyfunction]
fn algebraic_dual_demo(matrix: Vec<Vec<f64>>, rhs: Vec<f64>) -> PyResult<Option<Vec<f64>>> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || matrix.iter().any(|r| r.len() != cols) || rhs.len() != rows {
        return Err(PyValueError::new_err("matrix must be rectangular with one rhs entry per row"));
    }
    let a = DMatrix::from_fn(rows, cols, |i, j| matrix[i][j]);
    let b = DVector::from_vec(rhs);
    Ok(oracles::algebraic_dual_demo(&a, &b).solution().map(|x| x.iter().copied().collect()))
}

#[pyfunction]
fn err_omega(omega: Vec<[f64; 3]>, reference: Vec<[f64; 3]>) -> PyResult<Vec<f64>> {
    metrics::err_omega(&omega, &reference).map_err(to_py)
}

#[pymodule]
fn dualfem_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyHeatSolution>()?;
    m.add_class::<PyRigidBody>()?;
    m.add_function(wrap_pyfunction!(solve_heat, m)?)?;
    m.add_function(wrap_pyfunction!(solve_transport, m)?)?;
    m.add_function(wrap_pyfunction!(solve_euler, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(euler_free_exact, m)?)?;
    m.add_function(wrap_pyfunction!(rk45_reference, m)?)?;
    m.add_function(wrap_pyfunction!(heat_fourier_jump, m)?)?;
    m.add_function(wrap_pyfunction!(heat_transient, m)?)?;
    m.add_function(wrap_pyfunction!(transport_exact, m)?)?;
    m.add_function(wrap_pyfunction!(algebraic_dual_demo, m)?)?;
    m.add_function(wrap_pyfunction!(err_omega, m)?)?;
    Ok(())
}
