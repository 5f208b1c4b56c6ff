use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use seqnorm::duality::{identity_norm, kothe_dual_norm, multiplier_norm, BoundPair, NormResult};
use seqnorm::interpolation::k_functional;
use seqnorm::snumbers::{approx_bounds, eigenvalues, svd_values, Matrix};
use seqnorm::spaces::{fundamental, norm, parse_couple, SpaceDescriptor, Vector};
use seqnorm::summing::{concavity_estimate, summing_upper_main};
use seqnorm::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::ConvergenceFailure(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn vector(x: Vec<f64>) -> PyResult<Vector> {
    Vector::new(x).map_err(py_err)
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<Matrix> {
    Matrix::from_rows(&rows).map_err(py_err)
}

/// A parsed, validated space descriptor such as `lorentz(4/3,2)`.
#[pyclass(name = "Space", frozen)]
#[derive(Clone)]
pub struct PySpace {
    inner: SpaceDescriptor,
}

#[pymethods]
impl PySpace {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        let inner: SpaceDescriptor = src.parse().map_err(py_err)?;
        Ok(PySpace { inner })
    }

    fn norm(&self, x: Vec<f64>) -> PyResult<PyNormResult> {
        Ok(norm(&self.inner, &vector(x)?).map_err(py_err)?.into())
    }

    fn dual_norm(&self, x: Vec<f64>) -> PyResult<PyNormResult> {
        Ok(kothe_dual_norm(&self.inner, &vector(x)?).map_err(py_err)?.into())
    }

    fn fundamental(&self, n: usize) -> PyResult<f64> {
        Ok(fundamental(&self.inner, n).map_err(py_err)?.value)
    }

    fn dual(&self) -> Self {
        PySpace {
            inner: SpaceDescriptor::dual(self.inner.clone()).simplify(),
        }
    }

    fn simplify(&self) -> Self {
        PySpace {
            inner: self.inner.simplify(),
        }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Space('{}')", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(name = "NormResult", frozen, get_all)]
pub struct PyNormResult {
    value: f64,
    tag: &'static str,
}

impl From<NormResult> for PyNormResult {
    fn from(r: NormResult) -> Self {
        PyNormResult {
            value: r.value,
            tag: r.certification.tag(),
        }
    }
}

#[pymethods]
impl PyNormResult {
    fn __repr__(&self) -> String {
        format!("NormResult(value={}, tag='{}')", self.value, self.tag)
    }

    fn __float__(&self) -> f64 {
        self.value
    }
}

#[pyclass(name = "Bounds", frozen, get_all)]
pub struct PyBounds {
    lower: f64,
    upper: f64,
    witness: Option<Vec<f64>>,
}

impl From<BoundPair> for PyBounds {
    fn from(b: BoundPair) -> Self {
        PyBounds {
            lower: b.lower,
            upper: b.upper,
            witness: b.witness,
        }
    }
}

#[pymethods]
impl PyBounds {
    fn __repr__(&self) -> String {
        format!("Bounds(lower={}, upper={})", self.lower, self.upper)
    }
}

#[pyfunction]
fn multiplier(from: &PySpace, to: &PySpace, x: Vec<f64>) -> PyResult<PyBounds> {
    Ok(multiplier_norm(&from.inner, &to.inner, &vector(x)?).map_err(py_err)?.into())
}

#[pyfunction]
fn identity(from: &PySpace, to: &PySpace, n: usize) -> PyResult<PyBounds> {
    Ok(identity_norm(&from.inner, &to.inner, n).map_err(py_err)?.into())
}

/// Returns `(value, x0, x1, tag)` for the couple given as `"E0,E1"`.
#[pyfunction]
fn kfunctional(couple: &str, t: f64, x: Vec<f64>) -> PyResult<(f64, Vec<f64>, Vec<f64>, &'static str)> {
    let (e0, e1) = parse_couple(couple).map_err(py_err)?;
    let (k, split) = k_functional(&e0, &e1, t, &vector(x)?).map_err(py_err)?;
    Ok((
        k.value,
        split.x0.into_entries(),
        split.x1.into_entries(),
        k.certification.tag(),
    ))
}

#[pyfunction]
fn singular_values(rows: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    Ok(svd_values(&matrix(rows)?).map_err(py_err)?.into_entries())
}

/// Eigenvalues as `(re, im)` pairs, ordered by decreasing modulus.
#[pyfunction(name = "eigenvalues")]
fn py_eigenvalues(rows: Vec<Vec<f64>>) -> PyResult<Vec<(f64, f64)>> {
    eigenvalues(&matrix(rows)?).map_err(py_err)
}

#[pyfunction]
fn approximation_bounds(space: &PySpace, n: usize, k: usize) -> PyResult<PyBounds> {
    Ok(approx_bounds(&space.inner, n, k).map_err(py_err)?.into())
}

#[pyfunction]
#[pyo3(signature = (space, n, trials = 1000, seed = 42))]
fn concavity(space: &PySpace, n: usize, trials: usize, seed: u64) -> PyResult<PyBounds> {
    Ok(concavity_estimate(&space.inner, n, trials, seed).map_err(py_err)?.into())
}

#[pyfunction]
fn summing_upper(space: &PySpace) -> PyResult<f64> {
    summing_upper_main(&space.inner).map_err(py_err)
}

#[pymodule]
fn seqnorm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyNormResult>()?;
    m.add_class::<PyBounds>()?;
    m.add_function(wrap_pyfunction!(multiplier, m)?)?;
    m.add_function(wrap_pyfunction!(identity, m)?)?;
    m.add_function(wrap_pyfunction!(kfunctional, m)?)?;
    m.add_function(wrap_pyfunction!(singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(py_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(approximation_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(concavity, m)?)?;
    m.add_function(wrap_pyfunction!(summing_upper, m)?)?;
    Ok(())
}
