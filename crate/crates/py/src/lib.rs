//! Python bindings for the qsym toolkit.
//!
//! The module exposes the main types and operations: expression
//! manipulation (parse/simplify/differentiate/evaluate), circuits loaded
//! from the shared JSON schema, backend execution, observables and
//! gradients, random object generation, channel conversions, equivalence
//! checking, and partial traces.
//!
//! Build with `cargo build -p qsym-py --release`; the smoke test in
//! `python/smoke_test.py` locates and imports the produced cdylib.

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qsym_cli::errors::CliError;
use qsym_cli::observable::parse_observable;
use qsym_cli::schema::parse_circuit_value;
use qsym_core::backend::{qrun, BackendRegistry, RunOptions};
use qsym_core::channel::Channel;
use qsym_core::circuit::circuit_unitary;
use qsym_core::qstate::{QState, RegisterShape, StateBody};
use qsym_core::random::{
    random_dynamical_matrix, random_ket, random_unitary, SeededPrng,
};
use qsym_core::symexpr::{parse_expr, Binding, SymExpr};
use qsym_core::symlinalg::{SymMatrix, SymVector};
use qsym_core::testgen::{check_equivalence, EquivMethod, Verdict};
use qsym_core::variational::{
    gradient_parameter_shift, gradient_symbolic, EvalMode, Objective,
};
use qsym_core::Error as CoreError;

fn core_err(e: CoreError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cli_err(e: CliError) -> PyErr {
    match e.path {
        Some(path) => PyValueError::new_err(format!("{} (at {path})", e.message)),
        None => PyValueError::new_err(e.message),
    }
}

fn binding_from_map(values: HashMap<String, Complex64>) -> PyResult<Binding> {
    let mut binding = Binding::new();
    for (name, z) in values {
        binding.bind(&name, z).map_err(core_err)?;
    }
    Ok(binding)
}

fn matrix_to_rows(m: &SymMatrix) -> PyResult<Vec<Vec<Complex64>>> {
    let n = m.to_numeric().map_err(core_err)?;
    Ok((0..n.nrows())
        .map(|r| (0..n.ncols()).map(|c| n[(r, c)]).collect())
        .collect())
}

fn rows_to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<SymMatrix> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(PyValueError::new_err("matrix must be nonempty"));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("ragged matrix rows"));
    }
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    Ok(SymMatrix::from_complex_rows(flat.len() / cols, cols, &flat))
}

/// Parse and canonicalize an expression, returning its printed form.
#[pyfunction]
fn simplify(text: &str) -> PyResult<String> {
    let e = parse_expr(text).map_err(core_err)?;
    Ok(e.simplify().to_string())
}

/// Symbolic derivative of an expression with respect to a real symbol.
#[pyfunction]
fn differentiate(text: &str, symbol: &str) -> PyResult<String> {
    let e = parse_expr(text).map_err(core_err)?;
    Ok(e.differentiate(symbol).map_err(core_err)?.to_string())
}

/// Numerically evaluate an expression under a {name: value} binding.
#[pyfunction]
#[pyo3(signature = (text, bindings=None))]
fn evaluate(text: &str, bindings: Option<HashMap<String, Complex64>>) -> PyResult<Complex64> {
    let e = parse_expr(text).map_err(core_err)?;
    let binding = binding_from_map(bindings.unwrap_or_default())?;
    e.eval(&binding).map_err(core_err)
}

/// A quantum circuit loaded from the shared JSON schema.
#[pyclass]
struct Circuit {
    inner: qsym_core::circuit::Circuit,
    bindings: Binding,
}

#[pymethods]
impl Circuit {
    /// Load from circuit-file JSON text (same schema as the CLI).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let file = parse_circuit_value(&value).map_err(cli_err)?;
        Ok(Circuit { inner: file.circuit, bindings: file.bindings })
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    #[getter]
    fn num_gates(&self) -> usize {
        self.inner.gates().len()
    }

    /// Free parameter names in lexicographic order.
    fn free_symbols(&self) -> Vec<String> {
        self.inner.free_symbols().into_iter().collect()
    }

    /// Dense unitary after binding the given parameters.
    #[pyo3(signature = (bindings=None))]
    fn unitary(&self, bindings: Option<HashMap<String, Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
        let binding = self.bindings.merged(&binding_from_map(bindings.unwrap_or_default())?);
        let bound = self.inner.bind(&binding).map_err(core_err)?;
        let u = circuit_unitary(&bound).map_err(core_err)?;
        matrix_to_rows(&u)
    }

    /// Execute on a named backend; returns {"counts": {...}, "amplitudes":
    /// [...] | None}.
    #[pyo3(signature = (backend="sv-ideal", shots=0, seed=0, bindings=None))]
    fn run(
        &self,
        py: Python<'_>,
        backend: &str,
        shots: u64,
        seed: u64,
        bindings: Option<HashMap<String, Complex64>>,
    ) -> PyResult<Py<pyo3::types::PyDict>> {
        let binding = self.bindings.merged(&binding_from_map(bindings.unwrap_or_default())?);
        let registry = BackendRegistry::default();
        let chosen = registry.get(backend).map_err(core_err)?;
        let options = RunOptions { shots, seed, noise: None };
        let result = qrun(chosen.as_ref(), &self.inner, &binding, &options).map_err(core_err)?;
        let dict = pyo3::types::PyDict::new(py);
        dict.set_item("counts", result.counts)?;
        if let Some(state) = result.final_state {
            if let StateBody::Pure(v) = state.body() {
                if let Ok(nv) = v.to_numeric() {
                    let amps: Vec<Complex64> = nv.iter().copied().collect();
                    dict.set_item("amplitudes", amps)?;
                }
            }
        }
        Ok(dict.unbind())
    }

    /// Exact expectation value of an observable spec (e.g. "0.5*Z0*Z1 - 2")
    /// at bound parameters.
    #[pyo3(signature = (observable, bindings=None))]
    fn expectation(
        &self,
        observable: &str,
        bindings: Option<HashMap<String, Complex64>>,
    ) -> PyResult<f64> {
        let obs = parse_observable(observable).map_err(cli_err)?;
        let binding = self.bindings.merged(&binding_from_map(bindings.unwrap_or_default())?);
        let bound = self.inner.bind(&binding).map_err(core_err)?;
        let obj = Objective::new(bound, obs, EvalMode::Exact).map_err(core_err)?;
        if !obj.param_names().is_empty() {
            return Err(PyValueError::new_err(format!(
                "unbound parameters: {:?}",
                obj.param_names()
            )));
        }
        obj.value(&[]).map_err(core_err)
    }

    /// Parameter-shift gradient of an observable expectation at a
    /// parameter point given as {name: value}; returns (names, gradient).
    fn gradient_of(
        &self,
        observable: &str,
        bindings: HashMap<String, Complex64>,
    ) -> PyResult<(Vec<String>, Vec<f64>)> {
        let obs = parse_observable(observable).map_err(cli_err)?;
        let obj =
            Objective::new(self.inner.clone(), obs, EvalMode::Exact).map_err(core_err)?;
        let binding = self.bindings.merged(&binding_from_map(bindings)?);
        let params: Result<Vec<f64>, PyErr> = obj
            .param_names()
            .iter()
            .map(|name| {
                binding
                    .get(name)
                    .map(|z| z.re)
                    .ok_or_else(|| PyValueError::new_err(format!("unbound parameter '{name}'")))
            })
            .collect();
        let grad = gradient_parameter_shift(&obj, &params?).map_err(core_err)?;
        Ok((obj.param_names().to_vec(), grad))
    }

    /// Symbolic gradient expressions of an observable expectation.
    fn symbolic_gradient(&self, observable: &str) -> PyResult<(Vec<String>, Vec<String>)> {
        let obs = parse_observable(observable).map_err(cli_err)?;
        let obj =
            Objective::new(self.inner.clone(), obs, EvalMode::Exact).map_err(core_err)?;
        let grad = gradient_symbolic(&obj).map_err(core_err)?;
        Ok((
            obj.param_names().to_vec(),
            grad.iter().map(SymExpr::to_string).collect(),
        ))
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(num_qubits={}, num_gates={})",
            self.inner.num_qubits(),
            self.inner.gates().len()
        )
    }
}

/// Haar-random state vector.
#[pyfunction]
#[pyo3(signature = (dim, seed=0))]
fn haar_ket(dim: usize, seed: u64) -> PyResult<Vec<Complex64>> {
    let mut src = SeededPrng::new(seed);
    let ket = random_ket(dim, &mut src).map_err(core_err)?;
    let StateBody::Pure(v) = ket.body() else {
        return Err(PyRuntimeError::new_err("expected a pure state"));
    };
    let nv = v.to_numeric().map_err(core_err)?;
    Ok(nv.iter().copied().collect())
}

/// Haar-random unitary matrix (Ginibre QR with phase correction).
#[pyfunction]
#[pyo3(signature = (dim, seed=0))]
fn haar_unitary(dim: usize, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
    let mut src = SeededPrng::new(seed);
    let u = random_unitary(dim, &mut src).map_err(core_err)?;
    matrix_to_rows(&u)
}

/// Random CPTP channel from the Ginibre-induced measure, as a Kraus list.
#[pyfunction]
#[pyo3(signature = (dim, kraus_rank, seed=0))]
fn random_channel_kraus(dim: usize, kraus_rank: usize, seed: u64) -> PyResult<Vec<Vec<Vec<Complex64>>>> {
    let mut src = SeededPrng::new(seed);
    let ch = random_dynamical_matrix(dim, kraus_rank, &mut src).map_err(core_err)?;
    ch.kraus()
        .map_err(core_err)?
        .iter()
        .map(matrix_to_rows)
        .collect()
}

/// Superoperator matrix of a Kraus list (row-major vec convention).
#[pyfunction]
fn kraus_to_super(kraus: Vec<Vec<Vec<Complex64>>>) -> PyResult<Vec<Vec<Complex64>>> {
    let ks: Result<Vec<SymMatrix>, PyErr> = kraus.into_iter().map(rows_to_matrix).collect();
    let ch = Channel::from_kraus(ks?, false).map_err(core_err)?;
    matrix_to_rows(&ch.superoperator().map_err(core_err)?)
}

/// Kraus extraction from a superoperator matrix.
#[pyfunction]
fn super_to_kraus(
    matrix: Vec<Vec<Complex64>>,
    dim_in: usize,
    dim_out: usize,
) -> PyResult<Vec<Vec<Vec<Complex64>>>> {
    let m = rows_to_matrix(matrix)?;
    let ch = Channel::from_superoperator(m, dim_in, dim_out).map_err(core_err)?;
    ch.kraus()
        .map_err(core_err)?
        .iter()
        .map(matrix_to_rows)
        .collect()
}

/// Equivalence verdict between two circuit JSON documents:
/// "equivalent", "equivalent_up_to_global_phase", or "distinct".
#[pyfunction]
#[pyo3(signature = (json1, json2, method="exact_matrix", trials=16, seed=0))]
fn equivalence(
    json1: &str,
    json2: &str,
    method: &str,
    trials: usize,
    seed: u64,
) -> PyResult<String> {
    let parse = |text: &str| -> PyResult<qsym_core::circuit::Circuit> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let file = parse_circuit_value(&value).map_err(cli_err)?;
        file.circuit.bind(&file.bindings).map_err(core_err)
    };
    let a = parse(json1)?;
    let b = parse(json2)?;
    let method = match method {
        "exact_matrix" => EquivMethod::ExactMatrix,
        "randomized_states" => EquivMethod::RandomizedStates,
        "symbolic" => EquivMethod::Symbolic,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method '{other}'"
            )))
        }
    };
    let mut src = SeededPrng::new(seed);
    let report = check_equivalence(&a, &b, method, trials, &mut src).map_err(core_err)?;
    Ok(match report.verdict {
        Verdict::Equivalent => "equivalent".to_string(),
        Verdict::EquivalentUpToGlobalPhase => "equivalent_up_to_global_phase".to_string(),
        Verdict::Distinct(_) => "distinct".to_string(),
    })
}

/// Uhlmann fidelity of two pure states given as amplitude lists.
#[pyfunction]
fn state_fidelity(a: Vec<Complex64>, b: Vec<Complex64>) -> PyResult<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(PyValueError::new_err("amplitude lists must match in length"));
    }
    let dim = a.len();
    let shape = RegisterShape::new(vec![dim]).map_err(core_err)?;
    let qa = QState::pure_unchecked(shape.clone(), SymVector::from_complex_slice(&a));
    let qb = QState::pure_unchecked(shape, SymVector::from_complex_slice(&b));
    qsym_core::qstate::fidelity(&qa, &qb).map_err(core_err)
}

/// Partial trace of a density matrix over a register with the given
/// subsystem dimensions, keeping the listed subsystems.
#[pyfunction]
fn partial_trace(
    density: Vec<Vec<Complex64>>,
    dims: Vec<usize>,
    keep: Vec<usize>,
) -> PyResult<Vec<Vec<Complex64>>> {
    let m = rows_to_matrix(density)?;
    let shape = RegisterShape::new(dims).map_err(core_err)?;
    let state = QState::mixed_unchecked(shape, m);
    let reduced = state.partial_trace(&keep).map_err(core_err)?;
    matrix_to_rows(&reduced.density())
}

#[pymodule]
fn qsym_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Circuit>()?;
    m.add_function(wrap_pyfunction!(simplify, m)?)?;
    m.add_function(wrap_pyfunction!(differentiate, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(haar_ket, m)?)?;
    m.add_function(wrap_pyfunction!(haar_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(random_channel_kraus, m)?)?;
    m.add_function(wrap_pyfunction!(kraus_to_super, m)?)?;
    m.add_function(wrap_pyfunction!(super_to_kraus, m)?)?;
    m.add_function(wrap_pyfunction!(equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(state_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(partial_trace, m)?)?;
    Ok(())
}
