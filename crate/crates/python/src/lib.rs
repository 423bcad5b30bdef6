//! Python module `phasekit`.

use num_complex::Complex64;
use phasekit::blockenc::{OracleTable, ParityPair};
use phasekit::phasefn::{
    build_g_p, degree_for_epsilon, fourier_coeffs, SmoothingSpec, DEFAULT_DEGREE_CAP,
};
use phasekit::sampler::{self, BudgetMode};
use phasekit::synthesis::{self, RotationSequence as CoreSequence};
use phasekit::Error;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(err: Error) -> PyErr {
    if err.is_numerical_abort() {
        PyArithmeticError::new_err(err.to_string())
    } else {
        PyValueError::new_err(err.to_string())
    }
}

type Matrix = [[Complex64; 2]; 2];

#[pyclass(name = "LaurentPoly", module = "phasekit", from_py_object)]
#[derive(Clone)]
pub struct PyLaurentPoly {
    inner: phasekit::LaurentPoly,
}

#[pymethods]
impl PyLaurentPoly {
    /// Coefficients of `w^min_degree, w^(min_degree+1), ...`.
    #[new]
    fn new(min_degree: i64, coeffs: Vec<Complex64>) -> Self {
        PyLaurentPoly {
            inner: phasekit::LaurentPoly::new(min_degree, coeffs),
        }
    }

    #[getter]
    fn min_degree(&self) -> i64 {
        self.inner.min_degree()
    }

    #[getter]
    fn degree(&self) -> i64 {
        self.inner.degree()
    }

    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    fn coeff(&self, k: i64) -> Complex64 {
        self.inner.coeff(k)
    }

    /// Value at a point of the unit circle.
    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        self.inner.eval(z).map_err(to_py)
    }

    fn eval_angle(&self, theta: f64) -> Complex64 {
        self.inner.eval_angle(theta)
    }

    fn conj_reciprocal(&self) -> Self {
        PyLaurentPoly {
            inner: self.inner.conj_reciprocal(),
        }
    }

    /// `(even, odd)` exponent parts.
    fn parity_split(&self) -> (Self, Self) {
        let (e, o) = self.inner.parity_split();
        (PyLaurentPoly { inner: e }, PyLaurentPoly { inner: o })
    }

    fn scale(&self, s: Complex64) -> Self {
        PyLaurentPoly {
            inner: self.inner.scale(s),
        }
    }

    fn __add__(&self, other: &Self) -> Self {
        PyLaurentPoly {
            inner: &self.inner + &other.inner,
        }
    }

    fn __sub__(&self, other: &Self) -> Self {
        PyLaurentPoly {
            inner: &self.inner - &other.inner,
        }
    }

    fn __mul__(&self, other: &Self) -> Self {
        PyLaurentPoly {
            inner: self.inner.mul_poly(&other.inner),
        }
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(|inner| PyLaurentPoly { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "LaurentPoly(min_degree={}, degree={})",
            self.inner.min_degree(),
            self.inner.degree()
        )
    }
}

#[pyclass(name = "RotationSequence", module = "phasekit", from_py_object)]
#[derive(Clone)]
pub struct PyRotationSequence {
    inner: CoreSequence,
}

#[pymethods]
impl PyRotationSequence {
    #[new]
    fn new(factors: Vec<Matrix>) -> PyResult<Self> {
        let mats = factors.into_iter().map(phasekit::mat2::Mat2).collect();
        CoreSequence::new(mats)
            .map(|inner| PyRotationSequence { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_x_angles(angles: Vec<f64>) -> PyResult<Self> {
        CoreSequence::from_x_angles(&angles)
            .map(|inner| PyRotationSequence { inner })
            .map_err(to_py)
    }

    fn factors(&self) -> Vec<Matrix> {
        self.inner.factors().iter().map(|m| m.0).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// The 2x2 unitary at a point of the unit circle.
    fn reconstruct(&self, z: Complex64) -> PyResult<Matrix> {
        synthesis::reconstruct(&self.inner, z)
            .map(|m| m.0)
            .map_err(to_py)
    }

    #[pyo3(signature = (tol = 1e-8))]
    fn x_angles(&self, tol: f64) -> PyResult<Vec<f64>> {
        self.inner.x_angles(tol).map_err(to_py)
    }
}

/// Fourier truncation of the smoothed sawtooth: `(poly, sup_error)`.
#[pyfunction]
#[pyo3(signature = (d, p = 1, delta = std::f64::consts::FRAC_PI_2))]
fn fourier(d: usize, p: usize, delta: f64) -> PyResult<(PyLaurentPoly, f64)> {
    let spec = SmoothingSpec::new(p, delta).map_err(to_py)?;
    let t = fourier_coeffs(&build_g_p(spec), d);
    Ok((PyLaurentPoly { inner: t.poly }, t.sup_error))
}

/// Smallest degree whose certified error is at most `eps`: `(d, poly, sup_error)`.
#[pyfunction]
#[pyo3(signature = (eps, p = 1, delta = std::f64::consts::FRAC_PI_2))]
fn degree_for_eps(eps: f64, p: usize, delta: f64) -> PyResult<(usize, PyLaurentPoly, f64)> {
    let spec = SmoothingSpec::new(p, delta).map_err(to_py)?;
    let (d, t) = degree_for_epsilon(spec, eps, DEFAULT_DEGREE_CAP).map_err(to_py)?;
    Ok((d, PyLaurentPoly { inner: t.poly }, t.sup_error))
}

/// Rotation sequence whose top-left entry is `f`: `(sequence, residual)`.
#[pyfunction]
fn synthesize(f: &PyLaurentPoly) -> PyResult<(PyRotationSequence, f64)> {
    let syn = synthesis::synthesize(&f.inner).map_err(to_py)?;
    Ok((
        PyRotationSequence {
            inner: syn.sequence,
        },
        syn.residual,
    ))
}

#[pyfunction]
#[pyo3(signature = (f, eta = 0.01))]
fn rescale_to_admissible(f: &PyLaurentPoly, eta: f64) -> PyResult<PyLaurentPoly> {
    synthesis::rescale_to_admissible(&f.inner, eta)
        .map(|inner| PyLaurentPoly { inner })
        .map_err(to_py)
}

/// Sequences for both parity blocks of a truncation: `(even, odd, scale)`.
#[pyfunction]
#[pyo3(signature = (d, p = 1, delta = std::f64::consts::FRAC_PI_2, eta = 0.01))]
fn parity_pair(
    d: usize,
    p: usize,
    delta: f64,
    eta: f64,
) -> PyResult<(PyRotationSequence, PyRotationSequence, f64)> {
    let spec = SmoothingSpec::new(p, delta).map_err(to_py)?;
    let pair = ParityPair::synthesize(&fourier_coeffs(&build_g_p(spec), d), eta).map_err(to_py)?;
    Ok((
        PyRotationSequence { inner: pair.seq0 },
        PyRotationSequence { inner: pair.seq1 },
        pair.scale,
    ))
}

#[pyfunction]
fn tv_distance(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    sampler::tv_distance(&p, &q).map_err(to_py)
}

fn parse_mode(mode: &str) -> PyResult<BudgetMode> {
    match mode {
        "element" => Ok(BudgetMode::Element),
        "tv" => Ok(BudgetMode::Tv),
        other => Err(PyValueError::new_err(format!(
            "mode must be 'element' or 'tv', not {other:?}"
        ))),
    }
}

/// A simulated sampler for `x` with probability `c(x) / Σc`.
#[pyclass(name = "Sampler", module = "phasekit")]
pub struct PySampler {
    inner: sampler::Pipeline,
}

#[pymethods]
impl PySampler {
    #[new]
    #[pyo3(signature = (values, eps, p = 1, bits = 52, mode = "element", eta = 0.01))]
    fn new(
        values: Vec<f64>,
        eps: f64,
        p: usize,
        bits: u32,
        mode: &str,
        eta: f64,
    ) -> PyResult<Self> {
        let table = OracleTable::new(values, bits).map_err(to_py)?;
        let inner =
            sampler::Pipeline::build(table, eps, p, parse_mode(mode)?, eta).map_err(to_py)?;
        Ok(PySampler { inner })
    }

    /// The two-level instance with `c = 1/4` on the first half and `1/8` on the second.
    #[staticmethod]
    #[pyo3(signature = (n, eps, p = 1, eta = 0.01))]
    fn separation(n: usize, eps: f64, p: usize, eta: f64) -> PyResult<Self> {
        let table = sampler::separation_instance(n).map_err(to_py)?;
        let inner =
            sampler::Pipeline::build(table, eps, p, BudgetMode::Element, eta).map_err(to_py)?;
        Ok(PySampler { inner })
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.budget.d
    }

    #[getter]
    fn truncation_bits(&self) -> u32 {
        self.inner.budget.m_prime
    }

    #[getter]
    fn success_probability(&self) -> f64 {
        self.inner.initial.success_probability()
    }

    #[getter]
    fn amplified_success_probability(&self) -> f64 {
        self.inner.amplified.success_probability()
    }

    #[getter]
    fn amplification_iterations(&self) -> usize {
        self.inner.plan.iterations
    }

    #[getter]
    fn oracle_calls_per_trial(&self) -> usize {
        self.inner.queries.oracle_calls_per_trial
    }

    fn exact_distribution(&self) -> PyResult<Vec<f64>> {
        sampler::exact_distribution(&self.inner).map_err(to_py)
    }

    fn target_distribution(&self) -> PyResult<Vec<f64>> {
        self.inner.table.target_distribution().map_err(to_py)
    }

    /// Draws samples and returns the report as a dict.
    #[pyo3(signature = (n_samples, seed = 0))]
    fn sample<'py>(
        &self,
        py: Python<'py>,
        n_samples: u64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = sampler::sample(&self.inner, n_samples, seed).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("counts", r.counts)?;
        d.set_item("trials", r.trials)?;
        d.set_item("failed_post_selections", r.failed_post_selections)?;
        d.set_item("oracle_queries", r.oracle_queries)?;
        d.set_item("tv_exact", r.tv_exact)?;
        d.set_item("tv_empirical", r.tv_empirical)?;
        d.set_item("max_element_error", r.max_element_error)?;
        Ok(d)
    }
}

#[pymodule]
#[pyo3(name = "phasekit")]
pub fn phasekit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLaurentPoly>()?;
    m.add_class::<PyRotationSequence>()?;
    m.add_class::<PySampler>()?;
    m.add_function(wrap_pyfunction!(fourier, m)?)?;
    m.add_function(wrap_pyfunction!(degree_for_eps, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(rescale_to_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(parity_pair, m)?)?;
    m.add_function(wrap_pyfunction!(tv_distance, m)?)?;
    Ok(())
}
