//! Circuit file loading with JSON-pointer-qualified validation errors.
//!
//! Schema:
//!
//! ```json
//! {
//!   "num_qubits": 2,
//!   "gates": [
//!     { "name": "h", "targets": [0] },
//!     { "name": "rz", "targets": [1], "controls": [0], "params": ["theta"] },
//!     { "name": "g", "targets": [0], "matrix": [[[re,im],[re,im]], ...] }
//!   ],
//!   "noise": [
//!     { "qubit": 0, "kind": "bit_flip", "param": 0.1, "after_gate_index": 1 }
//!   ],
//!   "bindings": { "theta": 1.5707 }
//! }
//! ```
//!
//! Parameters and binding values may be numbers or expression strings in
//! the toolkit grammar; complex entries are `[re, im]` pairs. Unknown
//! fields are rejected.

use num_complex::Complex64;
use serde_json::Value;

use qsym_core::backend::{NoisePlacement, NoiseSpec};
use qsym_core::channel::NoiseKind;
use qsym_core::circuit::{BuiltinGate, Circuit, GateApp};
use qsym_core::symexpr::{parse_expr, Binding, SymExpr};
use qsym_core::symlinalg::SymMatrix;
use qsym_core::Error as CoreError;

use crate::errors::CliError;

pub struct CircuitFile {
    pub circuit: Circuit,
    pub noise: Option<NoiseSpec>,
    pub bindings: Binding,
}

pub fn load_circuit_file(path: &str) -> Result<CircuitFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read '{path}': {e}")))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::schema("/", format!("invalid JSON: {e}")))?;
    parse_circuit_value(&value)
}

pub fn parse_circuit_value(value: &Value) -> Result<CircuitFile, CliError> {
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::schema("/", "circuit file must be a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "num_qubits" | "gates" | "noise" | "bindings") {
            return Err(CliError::schema(format!("/{key}"), "unknown field"));
        }
    }
    let num_qubits = require_usize(obj.get("num_qubits"), "/num_qubits")?;
    if num_qubits == 0 {
        return Err(CliError::schema("/num_qubits", "must be at least 1"));
    }
    let gates = obj
        .get("gates")
        .ok_or_else(|| CliError::schema("/gates", "missing required field"))?
        .as_array()
        .ok_or_else(|| CliError::schema("/gates", "must be an array"))?;

    let mut circuit = Circuit::new(num_qubits);
    for (gi, gate_value) in gates.iter().enumerate() {
        let gpath = format!("/gates/{gi}");
        let gate = parse_gate(gate_value, &gpath, num_qubits)?;
        circuit.add(gate).map_err(|e| core_at(e, &gpath))?;
    }

    let bindings = match obj.get("bindings") {
        None => Binding::new(),
        Some(b) => parse_bindings(b, "/bindings")?,
    };

    let noise = match obj.get("noise") {
        None => None,
        Some(n) => Some(parse_noise(n, "/noise", &bindings, circuit.gates().len())?),
    };

    Ok(CircuitFile { circuit, noise, bindings })
}

fn core_at(e: CoreError, path: &str) -> CliError {
    let mut c = CliError::from(e);
    c.path = Some(path.to_string());
    c
}

fn require_usize(v: Option<&Value>, path: &str) -> Result<usize, CliError> {
    v.and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| CliError::schema(path, "expected a nonnegative integer"))
}

fn parse_gate(value: &Value, path: &str, num_qubits: usize) -> Result<GateApp, CliError> {
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::schema(path, "gate must be an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "name" | "targets" | "controls" | "params" | "matrix") {
            return Err(CliError::schema(format!("{path}/{key}"), "unknown field"));
        }
    }
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::schema(format!("{path}/name"), "expected a string"))?;
    let targets = parse_wires(obj.get("targets"), &format!("{path}/targets"), num_qubits)?;
    if targets.is_empty() {
        return Err(CliError::schema(format!("{path}/targets"), "must be nonempty"));
    }
    let controls = match obj.get("controls") {
        None => Vec::new(),
        Some(c) => parse_wires(Some(c), &format!("{path}/controls"), num_qubits)?,
    };
    let params = match obj.get("params") {
        None => Vec::new(),
        Some(Value::Array(items)) => {
            let mut out = Vec::new();
            for (pi, item) in items.iter().enumerate() {
                out.push(parse_param(item, &format!("{path}/params/{pi}"))?);
            }
            out
        }
        Some(_) => {
            return Err(CliError::schema(format!("{path}/params"), "must be an array"));
        }
    };

    if let Some(matrix_value) = obj.get("matrix") {
        if !params.is_empty() {
            return Err(CliError::schema(
                format!("{path}/params"),
                "custom-matrix gates take no params",
            ));
        }
        let m = parse_matrix(matrix_value, &format!("{path}/matrix"))?;
        return GateApp::custom(name, m, &targets, &controls).map_err(|e| core_at(e, path));
    }
    let builtin = BuiltinGate::from_name(name).ok_or_else(|| {
        CliError::schema(
            format!("{path}/name"),
            format!("unknown gate '{name}' (custom gates need a \"matrix\")"),
        )
    })?;
    GateApp::builtin(builtin, &targets, &controls, params).map_err(|e| core_at(e, path))
}

fn parse_wires(v: Option<&Value>, path: &str, num_qubits: usize) -> Result<Vec<usize>, CliError> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::schema(path, "expected an array of wire indices"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, item) in arr.iter().enumerate() {
        let w = item
            .as_u64()
            .ok_or_else(|| CliError::schema(format!("{path}/{i}"), "expected a wire index"))?
            as usize;
        if w >= num_qubits {
            return Err(CliError::schema(
                format!("{path}/{i}"),
                format!("wire {w} out of range for {num_qubits} qubits"),
            ));
        }
        out.push(w);
    }
    Ok(out)
}

/// A parameter is a number or an expression string.
pub fn parse_param(value: &Value, path: &str) -> Result<SymExpr, CliError> {
    match value {
        Value::Number(n) => {
            let f = n
                .as_f64()
                .ok_or_else(|| CliError::schema(path, "number out of range"))?;
            Ok(SymExpr::float(f))
        }
        Value::String(text) => parse_expr(text).map_err(|e| match e {
            CoreError::Syntax { pos, msg } => CliError::expr_syntax(path, pos, msg),
            other => core_at(other, path),
        }),
        _ => Err(CliError::schema(path, "expected a number or expression string")),
    }
}

fn parse_bindings(value: &Value, path: &str) -> Result<Binding, CliError> {
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::schema(path, "bindings must be an object"))?;
    let mut binding = Binding::new();
    for (name, v) in obj {
        let vpath = format!("{path}/{name}");
        let expr = parse_param(v, &vpath)?;
        let z = expr
            .to_complex()
            .map_err(|e| core_at(e, &vpath))?;
        binding.bind(name, z).map_err(|e| core_at(e, &vpath))?;
    }
    Ok(binding)
}

fn parse_noise(
    value: &Value,
    path: &str,
    bindings: &Binding,
    num_gates: usize,
) -> Result<NoiseSpec, CliError> {
    let arr = value
        .as_array()
        .ok_or_else(|| CliError::schema(path, "noise must be an array of placements"))?;
    let mut placements = Vec::new();
    for (i, item) in arr.iter().enumerate() {
        let ipath = format!("{path}/{i}");
        let obj = item
            .as_object()
            .ok_or_else(|| CliError::schema(&ipath, "placement must be an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "qubit" | "kind" | "param" | "after_gate_index") {
                return Err(CliError::schema(format!("{ipath}/{key}"), "unknown field"));
            }
        }
        let qubit = require_usize(obj.get("qubit"), &format!("{ipath}/qubit"))?;
        let kind_name = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::schema(format!("{ipath}/kind"), "expected a string"))?;
        let kind = NoiseKind::from_name(kind_name).ok_or_else(|| {
            CliError::schema(format!("{ipath}/kind"), format!("unknown noise kind '{kind_name}'"))
        })?;
        let param_expr = parse_param(
            obj.get("param")
                .ok_or_else(|| CliError::schema(format!("{ipath}/param"), "missing"))?,
            &format!("{ipath}/param"),
        )?;
        let param = param_expr
            .substitute(bindings)
            .and_then(|e| e.to_complex())
            .map_err(|e| core_at(e, &format!("{ipath}/param")))?;
        if param.im != 0.0 || !(0.0..=1.0).contains(&param.re) {
            return Err(CliError::schema(
                format!("{ipath}/param"),
                format!("noise parameter {param} outside [0, 1]"),
            ));
        }
        let after_gate_index =
            require_usize(obj.get("after_gate_index"), &format!("{ipath}/after_gate_index"))?;
        if after_gate_index >= num_gates.max(1) {
            return Err(CliError::schema(
                format!("{ipath}/after_gate_index"),
                format!("gate index {after_gate_index} out of range for {num_gates} gate(s)"),
            ));
        }
        placements.push(NoisePlacement {
            qubit,
            kind,
            param: param.re,
            after_gate_index,
        });
    }
    Ok(NoiseSpec { placements, uniform: None })
}

/// Parse a complex entry `[re, im]`.
pub fn parse_complex(value: &Value, path: &str) -> Result<Complex64, CliError> {
    let arr = value
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| CliError::schema(path, "expected a [re, im] pair"))?;
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| CliError::schema(format!("{path}/0"), "expected a number"))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| CliError::schema(format!("{path}/1"), "expected a number"))?;
    Ok(Complex64::new(re, im))
}

/// Parse a matrix of `[re, im]` entries (array of rows).
pub fn parse_matrix(value: &Value, path: &str) -> Result<SymMatrix, CliError> {
    let rows = value
        .as_array()
        .ok_or_else(|| CliError::schema(path, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(CliError::schema(path, "matrix must be nonempty"));
    }
    let mut data = Vec::new();
    let mut cols = None;
    for (r, row_value) in rows.iter().enumerate() {
        let row = row_value
            .as_array()
            .ok_or_else(|| CliError::schema(format!("{path}/{r}"), "expected a row array"))?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(CliError::schema(
                    format!("{path}/{r}"),
                    format!("row length {} differs from {c}", row.len()),
                ));
            }
            _ => {}
        }
        for (c, entry) in row.iter().enumerate() {
            data.push(parse_complex(entry, &format!("{path}/{r}/{c}"))?);
        }
    }
    let cols = cols.unwrap();
    if cols == 0 {
        return Err(CliError::schema(path, "matrix rows must be nonempty"));
    }
    Ok(SymMatrix::from_complex_rows(rows.len(), cols, &data))
}
