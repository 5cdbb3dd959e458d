//! Python bindings for the `momdet` crate.
//!
//! Large quantities cross the boundary in log form: moments as lists of
//! natural logs and integrals as (sign, logmag) pairs, so nothing overflows.
//! Verdicts and reports are returned as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

use momdet::asymptotics;
use momdet::criteria::{self, QFunction};
use momdet::error::Error;
use momdet::lambertw;
use momdet::moments::{self, io, FamilySpec, Support};
use momdet::quadrature;

create_exception!(
    momdet_py,
    MomdetError,
    PyException,
    "Invalid input to a momdet routine."
);
create_exception!(
    momdet_py,
    NumericError,
    MomdetError,
    "A momdet routine failed to converge."
);

fn to_py(err: Error) -> PyErr {
    if err.is_numeric() {
        NumericError::new_err(err.to_string())
    } else {
        MomdetError::new_err(err.to_string())
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| MomdetError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A quadrature result held as sign and natural log of the magnitude.
#[pyclass(module = "momdet_py", frozen)]
struct QuadratureResult {
    #[pyo3(get)]
    sign: i8,
    #[pyo3(get)]
    logmag: f64,
    #[pyo3(get)]
    est_rel_error: f64,
    #[pyo3(get)]
    nodes_used: usize,
}

#[pymethods]
impl QuadratureResult {
    /// The value as a float; inf once it exceeds the double range.
    #[getter]
    fn value(&self) -> f64 {
        f64::from(self.sign) * self.logmag.exp()
    }

    fn __repr__(&self) -> String {
        format!(
            "QuadratureResult(sign={}, logmag={}, est_rel_error={:e})",
            self.sign, self.logmag, self.est_rel_error
        )
    }
}

impl From<quadrature::QuadratureResult> for QuadratureResult {
    fn from(r: quadrature::QuadratureResult) -> Self {
        QuadratureResult {
            sign: r.value.sign(),
            logmag: r.value.logmag(),
            est_rel_error: r.est_rel_error,
            nodes_used: r.nodes_used,
        }
    }
}

#[pyclass(module = "momdet_py", frozen)]
struct MomentSequence {
    inner: moments::MomentSequence,
}

fn parse_support(name: &str) -> PyResult<Support> {
    match name {
        "stieltjes" => Ok(Support::Stieltjes),
        "hamburger-symmetric" => Ok(Support::HamburgerSymmetric),
        other => Err(MomdetError::new_err(format!("unknown support {other:?}"))),
    }
}

#[pymethods]
impl MomentSequence {
    /// Builds a sequence from natural logs of the stored moments.
    #[staticmethod]
    #[pyo3(signature = (log_moments, support = "stieltjes"))]
    fn from_log_moments(log_moments: Vec<f64>, support: &str) -> PyResult<Self> {
        let inner =
            moments::MomentSequence::from_ln_moments(parse_support(support)?, &log_moments, None)
                .map_err(to_py)?;
        Ok(MomentSequence { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(MomentSequence {
            inner: io::from_json(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(MomentSequence {
            inner: io::from_csv(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        io::to_json(&self.inner).map_err(to_py)
    }

    fn to_csv(&self) -> PyResult<String> {
        io::to_csv(&self.inner).map_err(to_py)
    }

    /// Natural logs of the stored moments; entry k is m_k, or m_{2k} for a
    /// symmetric sequence.
    fn log_moments(&self) -> Vec<f64> {
        self.inner.ln_entries()
    }

    fn carleman_terms(&self) -> PyResult<Vec<f64>> {
        moments::carleman_terms(&self.inner).map_err(to_py)
    }

    #[getter]
    fn support(&self) -> &'static str {
        self.inner.support().as_str()
    }

    #[getter]
    fn family(&self) -> Option<String> {
        self.inner.family().map(|f| f.label.clone())
    }

    #[getter]
    fn n_max(&self) -> usize {
        self.inner.n_max()
    }

    fn __len__(&self) -> usize {
        self.inner.entries().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "MomentSequence(support={:?}, n_max={}, family={:?})",
            self.support(),
            self.n_max(),
            self.family()
        )
    }
}

#[pyfunction]
fn lambert_w0(t: f64) -> PyResult<f64> {
    lambertw::w0(t).map_err(to_py)
}

#[pyfunction]
fn lambert_w_bounds(t: f64) -> PyResult<(f64, f64)> {
    lambertw::lambert_w_bounds(t).map_err(to_py)
}

/// S(p) = ∫₀^∞ ln(1+x)^p e^{-x} dx.
#[pyfunction]
#[pyo3(signature = (p, rel_tol = quadrature::DEFAULT_REL_TOL))]
fn integrate_logweighted(py: Python<'_>, p: f64, rel_tol: f64) -> PyResult<QuadratureResult> {
    py.detach(|| quadrature::integrate_logweighted(p, rel_tol))
        .map(Into::into)
        .map_err(to_py)
}

/// Γ⁽ⁿ⁾(1).
#[pyfunction]
fn gamma_derivative(py: Python<'_>, n: u32) -> PyResult<QuadratureResult> {
    py.detach(|| quadrature::gamma_derivative(n))
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn saddle_point(py: Python<'_>, t: f64) -> PyResult<Bound<'_, PyDict>> {
    let sp = asymptotics::saddle_point(t).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("t", sp.t)?;
    d.set_item("w", sp.w)?;
    d.set_item("x_t", sp.x_t)?;
    d.set_item("q_peak", sp.q_peak)?;
    d.set_item("q_curv", sp.q_curv)?;
    d.set_item("mu", sp.mu)?;
    d.set_item("residual", sp.residual)?;
    Ok(d)
}

/// Moments of a family given in its text form, e.g. "product[(1,1),(1,1)]".
#[pyfunction]
#[pyo3(signature = (family, n_max, rel_tol = quadrature::DEFAULT_REL_TOL))]
fn generate_moments(
    py: Python<'_>,
    family: &str,
    n_max: usize,
    rel_tol: f64,
) -> PyResult<MomentSequence> {
    let spec: FamilySpec = family.parse().map_err(to_py)?;
    let inner = py
        .detach(|| moments::generate_moments_tol(&spec, n_max, rel_tol))
        .map_err(to_py)?;
    Ok(MomentSequence { inner })
}

fn parse_q(q: &str) -> PyResult<QFunction> {
    q.parse().map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (seq, n_min = 1))]
fn check_carleman<'py>(
    py: Python<'py>,
    seq: &MomentSequence,
    n_min: usize,
) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(
        py,
        &criteria::check_carleman(&seq.inner, n_min).map_err(to_py)?,
    )
}

#[pyfunction]
#[pyo3(signature = (seq, q = "one"))]
fn check_growth_rate<'py>(
    py: Python<'py>,
    seq: &MomentSequence,
    q: &str,
) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(
        py,
        &criteria::check_growth_rate(&seq.inner, &parse_q(q)?).map_err(to_py)?,
    )
}

#[pyfunction]
fn check_q_divergence<'py>(py: Python<'py>, q: &str, n_max: usize) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(
        py,
        &criteria::check_q_divergence(&parse_q(q)?, n_max).map_err(to_py)?,
    )
}

#[pyfunction]
fn check_hardy<'py>(py: Python<'py>, seq: &MomentSequence) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &criteria::check_hardy(&seq.inner).map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (seq, q = "log"))]
fn analyze<'py>(py: Python<'py>, seq: &MomentSequence, q: &str) -> PyResult<Bound<'py, PyAny>> {
    let q = parse_q(q)?;
    let report = py
        .detach(|| criteria::analyze(&seq.inner, &q))
        .map_err(to_py)?;
    json_to_py(py, &report)
}

#[pymodule]
fn momdet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MomdetError", m.py().get_type::<MomdetError>())?;
    m.add("NumericError", m.py().get_type::<NumericError>())?;
    m.add_class::<QuadratureResult>()?;
    m.add_class::<MomentSequence>()?;
    m.add_function(wrap_pyfunction!(lambert_w0, m)?)?;
    m.add_function(wrap_pyfunction!(lambert_w_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_logweighted, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(saddle_point, m)?)?;
    m.add_function(wrap_pyfunction!(generate_moments, m)?)?;
    m.add_function(wrap_pyfunction!(check_carleman, m)?)?;
    m.add_function(wrap_pyfunction!(check_growth_rate, m)?)?;
    m.add_function(wrap_pyfunction!(check_q_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(check_hardy, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    Ok(())
}
