//! JSON emission: complex numbers as [re, im] pairs, matrices as arrays of
//! rows, states and run results as structured objects.

use num_complex::Complex64;
use serde_json::{json, Value};

use qsym_core::backend::RunResult;
use qsym_core::channel::Channel;
use qsym_core::numeric::CMatrix;
use qsym_core::qstate::{QState, StateBody};
use qsym_core::variational::OptimizerTrace;

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|r| {
            let row: Vec<Value> = (0..m.ncols()).map(|c| complex_json(m[(r, c)])).collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

pub fn state_json(state: &QState) -> Value {
    match state.body() {
        StateBody::Pure(v) => match v.to_numeric() {
            Ok(nv) => json!({
                "kind": "pure",
                "dims": state.shape().dims(),
                "amplitudes": nv.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
            }),
            Err(_) => json!({
                "kind": "pure",
                "dims": state.shape().dims(),
                "expressions": (0..v.dim()).map(|k| v.entry(k).to_string()).collect::<Vec<_>>(),
            }),
        },
        StateBody::Mixed(m) => match m.to_numeric() {
            Ok(nm) => json!({
                "kind": "mixed",
                "dims": state.shape().dims(),
                "density": matrix_json(&nm),
            }),
            Err(_) => json!({
                "kind": "mixed",
                "dims": state.shape().dims(),
                "expressions": (0..m.rows())
                    .map(|r| (0..m.cols()).map(|c| m.entry(r, c).to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            }),
        },
    }
}

/// Final states are included up to this register width.
const STATE_OUTPUT_LIMIT: usize = 8;

pub fn run_result_json(result: &RunResult) -> Value {
    let mut out = json!({
        "backend": result.metadata.backend,
        "seed": result.metadata.seed,
        "shots": result.metadata.shots,
        "elapsed_ms": result.metadata.elapsed.as_secs_f64() * 1e3,
        "counts": result.counts,
    });
    if let Some(state) = &result.final_state {
        if state.shape().num_subsystems() <= STATE_OUTPUT_LIMIT {
            out["final_state"] = state_json(state);
        }
    }
    out
}

pub fn channel_json(ch: &Channel) -> Value {
    let mut out = json!({
        "dim_in": ch.dim_in(),
        "dim_out": ch.dim_out(),
        "trace_preserving": ch.trace_preserving_flag(),
    });
    match ch.form() {
        qsym_core::channel::ChannelForm::Kraus(ks) => {
            out["form"] = json!("kraus");
            let matrices: Vec<Value> = ks
                .iter()
                .map(|k| matrix_json(&k.to_numeric().expect("numeric Kraus")))
                .collect();
            out["kraus"] = Value::Array(matrices);
        }
        qsym_core::channel::ChannelForm::Super(m) => {
            out["form"] = json!("super");
            out["matrix"] = matrix_json(&m.to_numeric().expect("numeric superoperator"));
        }
        qsym_core::channel::ChannelForm::Choi(m) => {
            out["form"] = json!("choi");
            out["matrix"] = matrix_json(&m.to_numeric().expect("numeric Choi"));
        }
    }
    out
}

pub fn trace_json(trace: &OptimizerTrace) -> Value {
    json!({
        "terminal_reason": match trace.terminal_reason {
            qsym_core::variational::TerminalReason::Converged => "converged",
            qsym_core::variational::TerminalReason::MaxIter => "max_iter",
            qsym_core::variational::TerminalReason::Stalled => "stalled",
        },
        "iterations": trace.iterations.iter().map(|p| json!({
            "params": p.params,
            "value": p.value,
            "gradient_norm": if p.gradient_norm.is_finite() {
                Value::from(p.gradient_norm)
            } else {
                Value::Null
            },
        })).collect::<Vec<_>>(),
    })
}
