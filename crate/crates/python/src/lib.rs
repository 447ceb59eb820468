//! Python bindings: `pylatheta.Lattice`, `pylatheta.Code` and the
//! reproduction report. Rationals cross the boundary as `"p/q"` strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use latheta::analytic;
use latheta::codes::{format_weight_enumerator, LinearCode};
use latheta::exact::{format_rational, parse_rational, RationalMatrix};
use latheta::gts::{generalized_theta_with, GtsOptions};
use latheta::repro::{self, ReproOptions};
use latheta::{builtin_code, builtin_lattice, dsp, theta_spectrum, Limits, QuadraticLattice, Rational};

fn py_err(e: latheta::Error) -> PyErr {
    if e.is_capacity() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn rational(text: &str) -> PyResult<Rational> {
    parse_rational(text).map_err(py_err)
}

fn terms(pairs: Vec<(Rational, u64)>) -> Vec<(String, u64)> {
    pairs.into_iter().map(|(m, c)| (format_rational(&m), c)).collect()
}

/// A lattice given by an exact rational Gram matrix.
#[pyclass(name = "Lattice", module = "pylatheta", frozen)]
pub struct PyLattice {
    inner: QuadraticLattice,
}

#[pymethods]
impl PyLattice {
    /// Gram matrix rows given as strings ("1/2") or integers.
    #[new]
    fn new(gram: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let rows = gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| rational(&x.str()?.to_cow()?))
                    .collect::<PyResult<Vec<_>>>()
            })
            .collect::<PyResult<Vec<_>>>()?;
        let matrix = RationalMatrix::from_rows(rows).map_err(py_err)?;
        let inner = QuadraticLattice::from_gram(matrix).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        builtin_lattice(name).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        QuadraticLattice::from_json(text).map(|inner| Self { inner }).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn label(&self) -> Option<String> {
        self.inner.label().map(str::to_owned)
    }

    #[getter]
    fn gram(&self) -> Vec<Vec<String>> {
        self.inner
            .gram()
            .to_rows()
            .iter()
            .map(|r| r.iter().map(format_rational).collect())
            .collect()
    }

    fn volume_sq(&self) -> String {
        format_rational(&self.inner.volume_sq())
    }

    fn dual(&self) -> Self {
        Self { inner: self.inner.dual() }
    }

    fn scale(&self, c: &str) -> PyResult<Self> {
        let inner = self.inner.scale(&rational(c)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// `[(mu, count), ...]` for all shells with squared norm <= bound.
    fn theta(&self, bound: &str) -> PyResult<Vec<(String, u64)>> {
        let s = theta_spectrum(&self.inner, &rational(bound)?, Limits::from_env().max_vectors).map_err(py_err)?;
        Ok(terms(s.pairs()))
    }

    #[pyo3(signature = (r, m, coeff_box=None))]
    fn gts(&self, py: Python<'_>, r: usize, m: usize, coeff_box: Option<i64>) -> PyResult<Vec<(String, u64)>> {
        let lattice = &self.inner;
        let series = py
            .detach(|| generalized_theta_with(lattice, r, m, GtsOptions { coeff_box }, &Limits::from_env()))
            .map_err(py_err)?;
        Ok(terms(series.pairs()))
    }

    fn norm_hierarchy(&self, py: Python<'_>) -> PyResult<Vec<String>> {
        let lattice = &self.inner;
        let h = py.detach(|| dsp::norm_hierarchy(lattice, &Limits::from_env())).map_err(py_err)?;
        Ok(h.values.iter().map(format_rational).collect())
    }

    /// `{"stable": bool, "volume_ok": bool, "violating_r": int | None, "witness": rows | None}`
    fn is_stable<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let lattice = &self.inner;
        let cert = py.detach(|| dsp::is_stable(lattice, &Limits::from_env())).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("stable", cert.stable)?;
        d.set_item("volume_ok", cert.volume_ok)?;
        d.set_item("violating_r", cert.violating_r)?;
        d.set_item("witness", cert.witness)?;
        d.set_item("exact", cert.exact)?;
        Ok(d)
    }

    #[pyo3(signature = (tau, tol=analytic::DEFAULT_TOL))]
    fn theta_value(&self, tau: f64, tol: f64) -> PyResult<f64> {
        analytic::theta_value(&self.inner, tau, tol, &Limits::from_env()).map_err(py_err)
    }

    #[pyo3(signature = (tau, tol=analytic::DEFAULT_TOL))]
    fn ratio(&self, tau: f64, tol: f64) -> PyResult<f64> {
        analytic::ratio(&self.inner, tau, tol, &Limits::from_env()).map_err(py_err)
    }

    /// `(grid, deltas, classification)` over a log-spaced grid.
    #[pyo3(signature = (tau_min=0.25, tau_max=4.0, steps=200, tol=analytic::DEFAULT_TOL))]
    fn ratio_scan(&self, tau_min: f64, tau_max: f64, steps: usize, tol: f64) -> PyResult<(Vec<f64>, Vec<f64>, String)> {
        let scan = analytic::ratio_scan(&self.inner, tau_min, tau_max, steps, tol, &Limits::from_env()).map_err(py_err)?;
        let report = analytic::extremum_scan(&scan).map_err(py_err)?;
        Ok((scan.grid, scan.deltas, report.classification.to_string()))
    }

    #[pyo3(signature = (tau0=1.0, samples=25, tol=analytic::DEFAULT_TOL))]
    fn symmetry_check(&self, tau0: f64, samples: usize, tol: f64) -> PyResult<f64> {
        analytic::symmetry_check(&self.inner, tau0, samples, tol, &Limits::from_env()).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Lattice(label={:?}, dim={}, volume_sq={})",
            self.inner.label().unwrap_or(""),
            self.inner.dim(),
            format_rational(&self.inner.volume_sq())
        )
    }
}

/// A linear code over Z_q given by generator rows.
#[pyclass(name = "Code", module = "pylatheta", frozen)]
pub struct PyCode {
    inner: LinearCode,
}

#[pymethods]
impl PyCode {
    #[new]
    fn new(q: u32, n: usize, generator: Vec<Vec<u32>>) -> PyResult<Self> {
        LinearCode::new(q, n, generator).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        builtin_code(name).map(|inner| Self { inner }).map_err(py_err)
    }

    /// Counts of codewords by Hamming weight, index = weight.
    fn weight_enumerator(&self) -> PyResult<Vec<u64>> {
        self.inner.weight_enumerator().map_err(py_err)
    }

    fn weight_enumerator_text(&self) -> PyResult<String> {
        Ok(format_weight_enumerator(&self.weight_enumerator()?))
    }

    fn weight_hierarchy(&self) -> PyResult<Vec<usize>> {
        self.inner.weight_hierarchy().map(|h| h.values).map_err(py_err)
    }

    fn construction_a(&self) -> PyResult<PyLattice> {
        self.inner.construction_a().map(|inner| PyLattice { inner }).map_err(py_err)
    }
}

/// Runs the reproduction checks; returns `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (strict_gts_example3=false))]
fn paper_repro(py: Python<'_>, strict_gts_example3: bool) -> (bool, String) {
    let options = ReproOptions {
        strict_gts_example3,
        ..ReproOptions::default()
    };
    let report = py.detach(|| repro::run(&Limits::from_env(), &options));
    (report.passed(), report.render())
}

#[pymodule]
fn pylatheta(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyCode>()?;
    m.add_function(wrap_pyfunction!(paper_repro, m)?)?;
    Ok(())
}
