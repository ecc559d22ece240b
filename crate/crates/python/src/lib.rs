//! Python bindings. Matrices cross the boundary as nested lists of complex
//! numbers; reports come back as dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use corrconv_core::{channels, linalg, measures, protocol, qudit, states};
use corrconv_core::{ComplexMatrix, C64};

fn err(e: corrconv_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "DensityMatrix", module = "corrconv")]
#[derive(Clone)]
pub struct PyDensityMatrix {
    inner: linalg::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(rows: Vec<Vec<C64>>, dims: Vec<usize>) -> PyResult<Self> {
        let m = ComplexMatrix::from_rows(&rows).map_err(err)?;
        Ok(Self {
            inner: linalg::DensityMatrix::new(m, dims).map_err(err)?,
        })
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    fn to_list(&self) -> Vec<Vec<C64>> {
        let m = self.inner.matrix();
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
    }

    /// Eigenvalues in ascending order.
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.spectrum().values.clone()
    }

    fn entropy(&self) -> f64 {
        linalg::von_neumann_entropy(&self.inner)
    }

    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: linalg::partial_trace(&self.inner, &keep).map_err(err)?,
        })
    }

    /// Smallest eigenvalue of the partial transpose on `subsystem`.
    fn min_pt_eigenvalue(&self, subsystem: usize) -> PyResult<f64> {
        Ok(states::ppt_check(&self.inner, subsystem).map_err(err)?.min_pt_eigenvalue)
    }

    fn is_ppt(&self, subsystem: usize) -> PyResult<bool> {
        Ok(states::ppt_check(&self.inner, subsystem).map_err(err)?.is_ppt)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dims={:?})", self.inner.dims())
    }
}

fn wrap(inner: linalg::DensityMatrix) -> PyDensityMatrix {
    PyDensityMatrix { inner }
}

#[pyfunction]
fn bell_diagonal_state(c1: f64, c2: f64, c3: f64) -> PyResult<PyDensityMatrix> {
    let params = states::BellDiagonalParams::bell_diagonal(c1, c2, c3).map_err(err)?;
    states::bell_diagonal_state(&params).map(wrap).map_err(err)
}

#[pyfunction]
fn bell_state(k: usize) -> PyResult<PyDensityMatrix> {
    if k > 3 {
        return Err(PyValueError::new_err("Bell index must be 0..=3"));
    }
    Ok(wrap(states::bell_state(k)))
}

#[pyfunction]
fn input_state(delta_in: f64) -> PyResult<PyDensityMatrix> {
    let spec = states::InputSpec::new(delta_in).map_err(err)?;
    states::input_tripartite(&spec).map(wrap).map_err(err)
}

/// Phase flip on B and measure-and-prepare on C; returns the three-qubit state.
#[pyfunction]
fn apply_joint(rho: &PyDensityMatrix, p: f64) -> PyResult<PyDensityMatrix> {
    channels::apply_joint(&rho.inner, p).map(|o| wrap(o.state)).map_err(err)
}

#[pyfunction]
fn phase_flip(rho: &PyDensityMatrix, p: f64, target: usize) -> PyResult<PyDensityMatrix> {
    let ch = channels::phase_flip(p).map_err(err)?;
    channels::kraus_apply(&ch, &rho.inner, target).map(wrap).map_err(err)
}

/// `(value, positive)` for Pauli noise `(px, py, pz)`.
#[pyfunction]
fn pauli_quantum_capacity(px: f64, py: f64, pz: f64) -> PyResult<(f64, bool)> {
    let noise = channels::PauliNoise::new(px, py, pz).map_err(err)?;
    Ok(channels::pauli_quantum_capacity(&noise))
}

#[pyfunction]
fn corner_block_gap(rho: &PyDensityMatrix) -> PyResult<f64> {
    states::corner_block_gap(&rho.inner).map_err(err)
}

#[pyfunction]
fn mutual_information(rho: &PyDensityMatrix) -> PyResult<f64> {
    measures::mutual_information(&rho.inner).map_err(err)
}

#[pyfunction]
fn coherent_information(rho: &PyDensityMatrix) -> PyResult<f64> {
    measures::coherent_information(&rho.inner).map_err(err)
}

#[pyfunction]
fn ree_numeric(rho: &PyDensityMatrix) -> PyResult<f64> {
    measures::ree_numeric(&rho.inner).map_err(err)
}

#[pyfunction]
fn ree_closed_form(p: f64, delta_in: f64) -> PyResult<f64> {
    measures::ree_closed_form_pipeline(p, delta_in).map_err(err)
}

#[pyfunction]
fn correlation_report<'py>(py: Python<'py>, delta_in: f64, p: f64) -> PyResult<Bound<'py, PyDict>> {
    let spec = states::InputSpec::new(delta_in).map_err(err)?;
    let r = measures::correlation_report(&spec, p).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("p", r.p)?;
    d.set_item("delta_in", r.delta_in)?;
    d.set_item("e_closed", r.e_closed)?;
    d.set_item("e_oracle", r.e_oracle)?;
    d.set_item("mutual_info", r.mutual_info)?;
    d.set_item("classical", r.classical)?;
    d.set_item("discord", r.discord)?;
    d.set_item("coherent_info", r.coherent_info)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (delta_in = 1.0 / 3.0, p = 1.0 / 3.0))]
fn verify_claims<'py>(py: Python<'py>, delta_in: f64, p: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = states::InputSpec::new(delta_in).map_err(err)?;
    protocol::verify_claims(&spec, p)
        .map_err(err)?
        .into_iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("id", c.id)?;
            d.set_item("citation", c.citation)?;
            d.set_item("paper_value", c.paper_value.to_string())?;
            d.set_item("computed_value", c.computed_value.to_string())?;
            d.set_item("verdict", c.verdict.as_str())?;
            d.set_item("note", c.note)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
fn batch_repeater<'py>(py: Python<'py>, n: usize, delta_in: f64, p: f64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let spec = states::InputSpec::new(delta_in).map_err(err)?;
    let b = protocol::batch_repeater(n, &spec, p, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n", b.n)?;
    d.set_item("flag0_count", b.entangled_indices.len())?;
    d.set_item("empirical_rate", b.empirical_rate)?;
    d.set_item("paper_predicted", b.paper_predicted)?;
    d.set_item("model_predicted", b.model_predicted)?;
    d.set_item("p0", b.p0)?;
    d.set_item("entangled_indices", b.entangled_indices)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (d, schmidt, p, m = None))]
fn qudit_report<'py>(
    py: Python<'py>,
    d: usize,
    schmidt: Vec<f64>,
    p: f64,
    m: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = qudit::QuditConfig::new(d, schmidt, p).map_err(err)?;
    if let Some(m) = m {
        cfg = cfg.with_m(m).map_err(err)?;
    }
    let r = qudit::qudit_report(&cfg);
    let out = PyDict::new(py);
    out.set_item("tau", r.tau)?;
    out.set_item("gamma_tau", r.gamma_tau)?;
    out.set_item("threshold", r.threshold)?;
    out.set_item("entangled", r.entangled)?;
    out.set_item("premise_holds", r.premise_holds)?;
    Ok(out)
}

#[pymodule]
pub fn corrconv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(bell_diagonal_state, m)?)?;
    m.add_function(wrap_pyfunction!(bell_state, m)?)?;
    m.add_function(wrap_pyfunction!(input_state, m)?)?;
    m.add_function(wrap_pyfunction!(apply_joint, m)?)?;
    m.add_function(wrap_pyfunction!(phase_flip, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_quantum_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(corner_block_gap, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_information, m)?)?;
    m.add_function(wrap_pyfunction!(ree_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(ree_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_report, m)?)?;
    m.add_function(wrap_pyfunction!(verify_claims, m)?)?;
    m.add_function(wrap_pyfunction!(batch_repeater, m)?)?;
    m.add_function(wrap_pyfunction!(qudit_report, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
