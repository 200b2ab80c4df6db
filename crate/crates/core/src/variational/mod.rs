//! Variational layer: weighted-Pauli observables, objective functions over
//! circuits, parameter-shift and symbolic gradients, and the classical
//! optimization loop.
//!
//! Parameter vectors follow the circuit's free symbols in lexicographic
//! order, frozen when the [`Objective`] is built.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use std::sync::Arc;

use crate::backend::{qrun, sample_amplitudes, Backend, RunOptions};
use crate::qstate::StateBody;
use crate::circuit::{
    apply_gate_amplitudes, cgate, Circuit, GatePayload,
};
use crate::error::{Error, Result};
use crate::random::SeededPrng;
use crate::symexpr::{Binding, SymExpr};

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Option<Pauli> {
        match ch.to_ascii_uppercase() {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Hermitian observable as a real-weighted sum of Pauli words; the empty
/// word is the identity term.
#[derive(Clone, Debug, Default)]
pub struct Observable {
    terms: Vec<(SymExpr, BTreeMap<usize, Pauli>)>,
}

impl Observable {
    pub fn new() -> Self {
        Observable::default()
    }

    pub fn add_term(
        &mut self,
        coefficient: SymExpr,
        paulis: BTreeMap<usize, Pauli>,
    ) -> Result<()> {
        if !coefficient.is_real_valued() {
            return Err(Error::domain(
                "observable coefficients must be real-valued".to_string(),
            ));
        }
        self.terms.push((coefficient, paulis));
        Ok(())
    }

    /// Single-wire Pauli Z term.
    pub fn z(wire: usize) -> Self {
        let mut o = Observable::new();
        o.add_term(SymExpr::one(), BTreeMap::from([(wire, Pauli::Z)])).unwrap();
        o
    }

    /// Weighted two-wire ZZ term.
    pub fn zz(u: usize, v: usize, weight: f64) -> Self {
        let mut o = Observable::new();
        o.add_term(
            SymExpr::float(weight),
            BTreeMap::from([(u, Pauli::Z), (v, Pauli::Z)]),
        )
        .unwrap();
        o
    }

    pub fn terms(&self) -> &[(SymExpr, BTreeMap<usize, Pauli>)] {
        &self.terms
    }

    pub fn max_wire(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|(_, ps)| ps.keys().copied())
            .max()
    }

    pub fn scaled(&self, factor: f64) -> Observable {
        Observable {
            terms: self
                .terms
                .iter()
                .map(|(c, ps)| (SymExpr::float(factor) * c.clone(), ps.clone()))
                .collect(),
        }
    }

    pub fn plus(&self, other: &Observable) -> Observable {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Observable { terms }
    }
}

/// Apply one Pauli word to packed amplitudes.
fn apply_pauli_word(
    amps: &[Complex64],
    paulis: &BTreeMap<usize, Pauli>,
    n: usize,
) -> Vec<Complex64> {
    let mut out = amps.to_vec();
    for (&wire, &p) in paulis {
        let mask = 1usize << (n - 1 - wire);
        match p {
            Pauli::Z => {
                for (idx, a) in out.iter_mut().enumerate() {
                    if idx & mask != 0 {
                        *a = -*a;
                    }
                }
            }
            Pauli::X => {
                for idx in 0..out.len() {
                    if idx & mask == 0 {
                        out.swap(idx, idx | mask);
                    }
                }
            }
            Pauli::Y => {
                let i = Complex64::new(0.0, 1.0);
                for idx in 0..out.len() {
                    if idx & mask == 0 {
                        let a = out[idx];
                        let b = out[idx | mask];
                        out[idx] = -i * b;
                        out[idx | mask] = i * a;
                    }
                }
            }
        }
    }
    out
}

/// Apply one Pauli word to symbolic amplitudes.
fn apply_pauli_word_symbolic(
    amps: &[SymExpr],
    paulis: &BTreeMap<usize, Pauli>,
    n: usize,
) -> Vec<SymExpr> {
    let mut out = amps.to_vec();
    for (&wire, &p) in paulis {
        let mask = 1usize << (n - 1 - wire);
        match p {
            Pauli::Z => {
                for (idx, a) in out.iter_mut().enumerate() {
                    if idx & mask != 0 {
                        *a = -a.clone();
                    }
                }
            }
            Pauli::X => {
                for idx in 0..out.len() {
                    if idx & mask == 0 {
                        out.swap(idx, idx | mask);
                    }
                }
            }
            Pauli::Y => {
                let i = SymExpr::imaginary();
                for idx in 0..out.len() {
                    if idx & mask == 0 {
                        let a = out[idx].clone();
                        let b = out[idx | mask].clone();
                        out[idx] = -(i.clone() * b);
                        out[idx | mask] = i.clone() * a;
                    }
                }
            }
        }
    }
    out
}

/// Evaluation mode of an objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Exact statevector expectation.
    Exact,
    /// Shot-based estimation: per Pauli term, rotate into the measurement
    /// basis, sample, and average parities. Deterministic given the seed.
    Sampled { shots: u64, seed: u64 },
}

/// Objective function <psi(params)| O |psi(params)> over a parametrized
/// circuit, starting from |0...0>.
///
/// Evaluation runs on the built-in statevector path unless a backend
/// handle is attached with [`Objective::with_backend`]; backend errors
/// propagate to the caller.
#[derive(Clone)]
pub struct Objective {
    circuit: Circuit,
    observable: Observable,
    mode: EvalMode,
    param_names: Vec<String>,
    backend: Option<Arc<dyn Backend>>,
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Objective")
            .field("circuit", &self.circuit)
            .field("mode", &self.mode)
            .field("param_names", &self.param_names)
            .field(
                "backend",
                &self.backend.as_ref().map(|b| b.name().to_string()),
            )
            .finish()
    }
}

impl Objective {
    pub fn new(circuit: Circuit, observable: Observable, mode: EvalMode) -> Result<Self> {
        if let Some(w) = observable.max_wire() {
            if w >= circuit.num_qubits() {
                return Err(Error::WireOutOfRange {
                    wire: w,
                    num_qubits: circuit.num_qubits(),
                });
            }
        }
        let param_names: Vec<String> = circuit.free_symbols().into_iter().collect();
        Ok(Objective { circuit, observable, mode, param_names, backend: None })
    }

    /// Evaluate through the given backend instead of the built-in
    /// statevector path. Exact mode reads the backend's final state;
    /// sampled mode estimates from its measurement counts (which also
    /// works for counts-only backends).
    pub fn with_backend(mut self, backend: Arc<dyn Backend>) -> Self {
        self.backend = Some(backend);
        self
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    /// Parameter names in the frozen (lexicographic) order.
    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn binding_for(&self, params: &[f64]) -> Result<Binding> {
        if params.len() != self.param_names.len() {
            return Err(Error::shape(format!(
                "parameter vector length {} does not match {} free symbol(s)",
                params.len(),
                self.param_names.len()
            )));
        }
        let mut b = Binding::new();
        for (name, &v) in self.param_names.iter().zip(params) {
            b.bind_real(name, v)?;
        }
        Ok(b)
    }

    /// Objective value at a parameter point.
    pub fn value(&self, params: &[f64]) -> Result<f64> {
        let binding = self.binding_for(params)?;
        self.value_of_circuit(&self.circuit, &binding)
    }

    fn value_of_circuit(&self, circuit: &Circuit, binding: &Binding) -> Result<f64> {
        let bound = circuit.bind(binding)?;
        if let Some(name) = bound.free_symbols().into_iter().next() {
            return Err(Error::UnboundSymbol(name));
        }
        match (&self.backend, self.mode) {
            (None, EvalMode::Exact) => exact_expectation(&bound, &self.observable),
            (None, EvalMode::Sampled { shots, seed }) => {
                sampled_expectation(&bound, &self.observable, shots, seed, None)
            }
            (Some(backend), EvalMode::Exact) => {
                let result = qrun(
                    backend.as_ref(),
                    &bound,
                    &Binding::new(),
                    &RunOptions::default(),
                )?;
                let Some(state) = result.final_state else {
                    return Err(Error::Capability(format!(
                        "backend '{}' exposes no final state; use sampled mode",
                        backend.name()
                    )));
                };
                expectation_of_state(&state, &self.observable)
            }
            (Some(backend), EvalMode::Sampled { shots, seed }) => sampled_expectation(
                &bound,
                &self.observable,
                shots,
                seed,
                Some(backend.as_ref()),
            ),
        }
    }
}

/// Expectation tr(O rho) (or <psi|O|psi>) of a numeric state.
pub fn expectation_of_state(state: &crate::qstate::QState, observable: &Observable) -> Result<f64> {
    let n = state.shape().num_subsystems();
    if state.shape().dims().iter().any(|&d| d != 2) {
        return Err(Error::shape("observables act on qubit registers".to_string()));
    }
    match state.body() {
        StateBody::Pure(v) => {
            let amps: Vec<Complex64> = v.to_numeric()?.iter().copied().collect();
            let mut total = 0.0;
            for (coeff, paulis) in observable.terms() {
                let c = coeff.to_complex()?;
                let transformed = apply_pauli_word(&amps, paulis, n);
                let mut inner = Complex64::new(0.0, 0.0);
                for (a, b) in amps.iter().zip(transformed.iter()) {
                    inner += a.conj() * b;
                }
                total += c.re * inner.re - c.im * inner.im;
            }
            Ok(total)
        }
        StateBody::Mixed(m) => {
            let rho = m.to_numeric()?;
            let dim = rho.nrows();
            let mut total = 0.0;
            for (coeff, paulis) in observable.terms() {
                let c = coeff.to_complex()?;
                // tr(P rho): apply the Pauli word to each column and read
                // the diagonal entry
                let mut tr = Complex64::new(0.0, 0.0);
                for col in 0..dim {
                    let column: Vec<Complex64> = (0..dim).map(|r| rho[(r, col)]).collect();
                    let transformed = apply_pauli_word(&column, paulis, n);
                    tr += transformed[col];
                }
                total += c.re * tr.re - c.im * tr.im;
            }
            Ok(total)
        }
    }
}

fn circuit_amplitudes(circuit: &Circuit) -> Result<Vec<Complex64>> {
    let n = circuit.num_qubits();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
    amps[0] = Complex64::new(1.0, 0.0);
    for g in circuit.gates() {
        let u = g.block_matrix()?.to_numeric()?;
        apply_gate_amplitudes(&mut amps, &u, g.targets(), g.controls(), n);
    }
    Ok(amps)
}

fn exact_expectation(circuit: &Circuit, observable: &Observable) -> Result<f64> {
    let n = circuit.num_qubits();
    let amps = circuit_amplitudes(circuit)?;
    let mut total = 0.0;
    for (coeff, paulis) in observable.terms() {
        let c = coeff.to_complex()?;
        let transformed = apply_pauli_word(&amps, paulis, n);
        let mut inner = Complex64::new(0.0, 0.0);
        for (a, b) in amps.iter().zip(transformed.iter()) {
            inner += a.conj() * b;
        }
        total += c.re * inner.re - c.im * inner.im;
    }
    Ok(total)
}

fn sampled_expectation(
    circuit: &Circuit,
    observable: &Observable,
    shots: u64,
    seed: u64,
    backend: Option<&dyn Backend>,
) -> Result<f64> {
    let n = circuit.num_qubits();
    let mut total = 0.0;
    for (term_idx, (coeff, paulis)) in observable.terms().iter().enumerate() {
        let c = coeff.to_complex()?.re;
        if paulis.is_empty() {
            total += c;
            continue;
        }
        // rotate each measured wire into the computational basis:
        // X -> H, Y -> P(-pi/2) then H
        let mut rotated = circuit.clone();
        for (&wire, &p) in paulis {
            match p {
                Pauli::Z => {}
                Pauli::X => rotated.h(wire)?,
                Pauli::Y => {
                    rotated.phase(
                        wire,
                        -(SymExpr::pi() * SymExpr::rational(1, 2)),
                    )?;
                    rotated.h(wire)?;
                }
            }
        }
        let counts = match backend {
            None => {
                let amps = circuit_amplitudes(&rotated)?;
                let mut src = SeededPrng::new(seed.wrapping_add(term_idx as u64));
                sample_amplitudes(&amps, shots, n, &mut src)?
            }
            Some(backend) => {
                let options = RunOptions {
                    shots,
                    seed: seed.wrapping_add(term_idx as u64),
                    noise: None,
                };
                qrun(backend, &rotated, &Binding::new(), &options)?.counts
            }
        };
        let mut acc = 0.0;
        for (key, count) in &counts {
            let mut parity = 1.0;
            for &wire in paulis.keys() {
                if key.as_bytes()[wire] == b'1' {
                    parity = -parity;
                }
            }
            acc += parity * *count as f64;
        }
        total += c * acc / shots as f64;
    }
    Ok(total)
}

/// Gradient by the parameter-shift rule, summed per gate occurrence: for a
/// gate angle affine in the parameter (phi = a + c * theta),
/// d f / d theta accumulates c * [f(phi + pi/2) - f(phi - pi/2)] / 2.
/// Exact for exact-mode objectives.
pub fn gradient_parameter_shift(obj: &Objective, params: &[f64]) -> Result<Vec<f64>> {
    Ok(gradient_with_eval_count(obj, params)?.0)
}

fn gradient_with_eval_count(obj: &Objective, params: &[f64]) -> Result<(Vec<f64>, usize)> {
    let binding = obj.binding_for(params)?;
    let mut eval_count = 0usize;
    let mut gradient = vec![0.0; obj.param_names().len()];
    for (slot, name) in obj.param_names().iter().enumerate() {
        // collect the shifted evaluations for every occurrence first, then
        // run them in parallel (they are independent pure evaluations)
        let mut jobs: Vec<(f64, Circuit)> = Vec::new();
        for (gate_idx, gate) in obj.circuit().gates().iter().enumerate() {
            let Some(param) = gate.params().first() else {
                if gate.free_symbols().contains(name) {
                    return Err(Error::UnsupportedGateForShift(gate.name().to_string()));
                }
                continue;
            };
            if !param.contains_symbol(name) {
                continue;
            }
            let rotation_ok = matches!(
                gate.payload(),
                GatePayload::Builtin(g) if g.is_shift_rotation()
            ) && gate.controls().is_empty();
            if !rotation_ok {
                return Err(Error::UnsupportedGateForShift(gate.name().to_string()));
            }
            // the angle must be affine in the parameter
            let slope = param.differentiate(name)?;
            if slope.contains_symbol(name) {
                return Err(Error::UnsupportedGateForShift(gate.name().to_string()));
            }
            let slope_value = slope.eval(&binding)?.re;
            if slope_value == 0.0 {
                continue;
            }
            let half_pi = SymExpr::pi() * SymExpr::rational(1, 2);
            for sign in [1i64, -1] {
                let shifted_param =
                    param.clone() + SymExpr::int(sign) * half_pi.clone();
                let shifted_gate = gate.with_params(vec![shifted_param])?;
                let shifted = obj.circuit().with_gate_replaced(gate_idx, shifted_gate)?;
                jobs.push((slope_value * sign as f64 / 2.0, shifted));
            }
        }
        eval_count += jobs.len();
        let contributions: Result<Vec<f64>> = jobs
            .par_iter()
            .map(|(weight, circuit)| Ok(weight * obj.value_of_circuit(circuit, &binding)?))
            .collect();
        gradient[slot] = contributions?.into_iter().sum();
    }
    Ok((gradient, eval_count))
}

/// Size limit for the symbolic gradient path (symbolic state vectors are
/// materialized).
pub const SYMBOLIC_GRADIENT_LIMIT: usize = 6;

/// Fully symbolic expectation <0| U† O U |0> as an expression.
pub fn symbolic_expectation(circuit: &Circuit, observable: &Observable) -> Result<SymExpr> {
    let n = circuit.num_qubits();
    if n > SYMBOLIC_GRADIENT_LIMIT {
        return Err(Error::SizeLimit(format!(
            "symbolic expectation limited to {SYMBOLIC_GRADIENT_LIMIT} qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    // psi = U |0...0>, accumulated gate by gate symbolically
    let mut amps: Vec<SymExpr> = (0..dim)
        .map(|k| if k == 0 { SymExpr::one() } else { SymExpr::zero() })
        .collect();
    for g in circuit.gates() {
        let block = g.block_matrix()?;
        let embedded = cgate(&block, g.targets(), g.controls(), n)?;
        let mut next = vec![SymExpr::zero(); dim];
        for (r, slot) in next.iter_mut().enumerate() {
            let mut acc = SymExpr::zero();
            for (c, amp) in amps.iter().enumerate() {
                if amp.is_zero() {
                    continue;
                }
                acc = acc + embedded.entry(r, c) * amp.clone();
            }
            *slot = acc.simplify();
        }
        amps = next;
    }
    let mut total = SymExpr::zero();
    for (coeff, paulis) in observable.terms() {
        let transformed = apply_pauli_word_symbolic(&amps, paulis, n);
        let mut inner = SymExpr::zero();
        for (a, b) in amps.iter().zip(transformed.iter()) {
            inner = inner + a.conj() * b.clone();
        }
        total = total + coeff.clone() * inner;
    }
    Ok(total.simplify())
}

/// Symbolic gradient: builds the symbolic expectation and differentiates it
/// per parameter (lexicographic order). Evaluating the result matches
/// [`gradient_parameter_shift`] on bound points.
pub fn gradient_symbolic(obj: &Objective) -> Result<Vec<SymExpr>> {
    let f = symbolic_expectation(obj.circuit(), obj.observable())?;
    obj.param_names()
        .iter()
        .map(|name| f.differentiate(name))
        .collect()
}

/// Optimization method.
#[derive(Clone, Copy, Debug)]
pub enum Method {
    /// Fixed learning rate with a halving backtracking line search
    /// (simple-decrease acceptance, monotone iterates).
    GradientDescent { lr: f64 },
    /// Diagonal step-size schedule: per-coordinate steps
    /// lr / sqrt(sum of squared gradients).
    Adaptive { lr: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminalReason {
    Converged,
    MaxIter,
    Stalled,
}

#[derive(Clone, Debug)]
pub struct TracePoint {
    pub params: Vec<f64>,
    pub value: f64,
    /// Euclidean norm of the gradient at this iterate; infinity when the
    /// evaluation budget ran out before a gradient was computed.
    pub gradient_norm: f64,
}

/// Record of every accepted iterate.
#[derive(Clone, Debug)]
pub struct OptimizerTrace {
    pub iterations: Vec<TracePoint>,
    pub terminal_reason: TerminalReason,
}

impl std::fmt::Display for OptimizerTrace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} iterate(s), terminal reason {:?}",
            self.iterations.len(),
            self.terminal_reason
        )
    }
}

const STALL_LIMIT: usize = 20;
const MAX_BACKTRACKS: usize = 30;

/// Minimize the objective from `init`. Terminates on gradient norm below
/// `tol` (converged), `budget` exhausted objective evaluations (max_iter),
/// or [`STALL_LIMIT`] consecutive non-improving steps (stalled). A
/// non-finite objective aborts with the partial trace attached.
pub fn optimize(
    obj: &Objective,
    init: &[f64],
    method: Method,
    budget: usize,
    tol: f64,
) -> Result<OptimizerTrace> {
    if init.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("initial parameters must be finite".to_string()));
    }
    let mut evals = 0usize;
    let mut trace = OptimizerTrace {
        iterations: Vec::new(),
        terminal_reason: TerminalReason::MaxIter,
    };
    let eval = |trace: &OptimizerTrace, params: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = obj.value(params)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective { trace: Box::new(trace.clone()) });
        }
        Ok(v)
    };

    let mut x = init.to_vec();
    let mut fx = eval(&trace, &x, &mut evals)?;
    trace.iterations.push(TracePoint {
        params: x.clone(),
        value: fx,
        gradient_norm: f64::INFINITY,
    });

    let mut stall = 0usize;
    let mut grad_accum = vec![0.0; x.len()];
    loop {
        if evals >= budget {
            trace.terminal_reason = TerminalReason::MaxIter;
            break;
        }
        if x.is_empty() {
            trace.terminal_reason = TerminalReason::Converged;
            break;
        }
        // gradient via parameter shift: 2 evaluations per occurrence
        let (g, shift_evals) = gradient_with_eval_count(obj, &x)?;
        evals += shift_evals.max(1);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if let Some(last) = trace.iterations.last_mut() {
            last.gradient_norm = gnorm;
        }
        if gnorm < tol {
            trace.terminal_reason = TerminalReason::Converged;
            break;
        }
        let (candidate, fc) = match method {
            Method::GradientDescent { lr } => {
                let mut step = lr;
                let mut found = None;
                for _ in 0..MAX_BACKTRACKS {
                    if evals >= budget {
                        break;
                    }
                    let cand: Vec<f64> =
                        x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
                    let fc = eval(&trace, &cand, &mut evals)?;
                    if fc < fx {
                        found = Some((cand, fc));
                        break;
                    }
                    step /= 2.0;
                }
                match found {
                    Some(pair) => pair,
                    None => {
                        if evals >= budget {
                            trace.terminal_reason = TerminalReason::MaxIter;
                            break;
                        }
                        stall += 1;
                        if stall >= STALL_LIMIT {
                            trace.terminal_reason = TerminalReason::Stalled;
                            break;
                        }
                        continue;
                    }
                }
            }
            Method::Adaptive { lr } => {
                for (acc, gi) in grad_accum.iter_mut().zip(&g) {
                    *acc += gi * gi;
                }
                let cand: Vec<f64> = x
                    .iter()
                    .zip(&g)
                    .zip(&grad_accum)
                    .map(|((xi, gi), acc)| xi - lr / (acc.sqrt() + 1e-12) * gi)
                    .collect();
                if evals >= budget {
                    trace.terminal_reason = TerminalReason::MaxIter;
                    break;
                }
                let fc = eval(&trace, &cand, &mut evals)?;
                (cand, fc)
            }
        };
        if fc >= fx {
            stall += 1;
        } else {
            stall = 0;
        }
        x = candidate;
        fx = fc;
        trace.iterations.push(TracePoint {
            params: x.clone(),
            value: fx,
            gradient_norm: f64::INFINITY,
        });
        if stall >= STALL_LIMIT {
            trace.terminal_reason = TerminalReason::Stalled;
            break;
        }
    }
    Ok(trace)
}

/// Hook receiving the finished trace and optionally proposing a replacement
/// ansatz circuit; restructuring strategies plug in here.
pub type AnsatzHook<'a> = &'a dyn Fn(&OptimizerTrace) -> Option<Circuit>;

/// Run [`optimize`], then hand the trace to the hook; when the hook returns
/// a replacement circuit, rebuild the objective around it and continue with
/// the same settings (one restructuring round).
pub fn optimize_with_ansatz_hook(
    obj: &Objective,
    init: &[f64],
    method: Method,
    budget: usize,
    tol: f64,
    hook: AnsatzHook<'_>,
) -> Result<(Objective, OptimizerTrace)> {
    let trace = optimize(obj, init, method, budget, tol)?;
    if let Some(new_circuit) = hook(&trace) {
        let rebuilt = Objective::new(new_circuit, obj.observable().clone(), obj.mode)?;
        let last = trace.iterations.last().expect("trace nonempty");
        let init: Vec<f64> = if rebuilt.param_names().len() == last.params.len() {
            last.params.clone()
        } else {
            vec![0.0; rebuilt.param_names().len()]
        };
        let second = optimize(&rebuilt, &init, method, budget, tol)?;
        return Ok((rebuilt, second));
    }
    Ok((obj.clone(), trace))
}
