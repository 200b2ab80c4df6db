//! Quantum-software-testing support: test-case generation (computational
//! basis, one-parameter symbolic families, Haar-random inputs), circuit
//! equivalence checking with witnesses, subsystem-level validation, and the
//! mutation operators used for fault-injection studies.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuit::{apply_circuit, circuit_unitary, BuiltinGate, Circuit, GateApp, GatePayload};
use crate::error::{Error, Result};
use crate::numeric::{self, CMatrix};
use crate::qstate::{fidelity, QState, RegisterShape, StateBody};
use crate::random::EntropySource;
use crate::symexpr::{Binding, SymExpr};
use crate::symlinalg::SymVector;

/// Basis-strategy width limit; beyond this the case count explodes and an
/// explicit override is required.
pub const BASIS_STRATEGY_LIMIT: usize = 6;
/// Width limit for dense unitary comparison.
pub const EXACT_MATRIX_LIMIT: usize = 10;
/// Width limit for symbolic unitary comparison.
pub const SYMBOLIC_METHOD_LIMIT: usize = 5;
/// Fidelity deficit above which two outputs witness distinctness.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

/// Expected outcome of a test case.
#[derive(Clone, Debug)]
pub enum Expected {
    State(QState),
    /// Bitstring to probability (expressions allowed for symbolic
    /// families); probabilities must sum to one after binding.
    Distribution(BTreeMap<String, SymExpr>),
}

/// One generated test case.
#[derive(Clone, Debug)]
pub struct TestCase {
    pub input: QState,
    pub expected: Expected,
    pub tolerance: f64,
}

/// Test-case generation strategy.
#[derive(Clone, Debug)]
pub enum Strategy {
    /// One case per computational basis state.
    Basis,
    /// One-parameter families cos(a)|i> + sin(a)|j> over basis pairs;
    /// an empty list defaults to (0, 2^n - 1).
    SymbolicFamily { pairs: Vec<(usize, usize)> },
    /// Haar-random input states.
    RandomKets { count: usize },
}

/// Generate test cases for a (numeric) circuit; expected outputs come from
/// exact statevector simulation (symbolic for the symbolic family).
pub fn generate_test_cases(
    circuit: &Circuit,
    strategy: &Strategy,
    src: &mut dyn EntropySource,
) -> Result<Vec<TestCase>> {
    generate_test_cases_with_limit(circuit, strategy, src, BASIS_STRATEGY_LIMIT)
}

/// As [`generate_test_cases`] with an explicit basis-strategy width limit.
pub fn generate_test_cases_with_limit(
    circuit: &Circuit,
    strategy: &Strategy,
    src: &mut dyn EntropySource,
    basis_limit: usize,
) -> Result<Vec<TestCase>> {
    let n = circuit.num_qubits();
    if !circuit.is_numeric() {
        return Err(Error::NotNumeric(
            "test-case generation needs a fully bound circuit".to_string(),
        ));
    }
    let dim = 1usize << n;
    let shape = RegisterShape::qubits(n)?;
    match strategy {
        Strategy::Basis => {
            if n > basis_limit {
                return Err(Error::SizeLimit(format!(
                    "basis strategy on {n} qubits exceeds the {basis_limit}-qubit limit \
                     (pass an explicit override to force it)"
                )));
            }
            (0..dim)
                .map(|b| {
                    let input = QState::basis(shape.clone(), b)?;
                    let expected = apply_circuit(circuit, &input)?;
                    Ok(TestCase {
                        input,
                        expected: Expected::State(expected),
                        tolerance: 1e-9,
                    })
                })
                .collect()
        }
        Strategy::SymbolicFamily { pairs } => {
            let default_pairs = vec![(0usize, dim - 1)];
            let pairs = if pairs.is_empty() { &default_pairs } else { pairs };
            let alpha = SymExpr::symbol("alpha");
            pairs
                .iter()
                .map(|&(i, j)| {
                    if i >= dim || j >= dim || i == j {
                        return Err(Error::IndexOutOfRange { index: i.max(j), dim });
                    }
                    let mut amps = vec![SymExpr::zero(); dim];
                    amps[i] = alpha.cos();
                    amps[j] = alpha.sin();
                    let input =
                        QState::pure_unchecked(shape.clone(), SymVector::from_entries(amps));
                    let expected = apply_circuit(circuit, &input)?;
                    Ok(TestCase {
                        input,
                        expected: Expected::State(expected),
                        tolerance: 1e-9,
                    })
                })
                .collect()
        }
        Strategy::RandomKets { count } => (0..*count)
            .map(|_| {
                let input = haar_state(n, src)?;
                let expected = apply_circuit(circuit, &input)?;
                Ok(TestCase {
                    input,
                    expected: Expected::State(expected),
                    tolerance: 1e-9,
                })
            })
            .collect(),
    }
}

/// Haar-random pure state on an n-qubit register.
pub fn haar_state(n: usize, src: &mut dyn EntropySource) -> Result<QState> {
    let dim = 1usize << n;
    let g = crate::random::ginibre(dim, 1, src)?;
    let norm = g.norm();
    let amps: Vec<Complex64> = g.iter().map(|z| z / norm).collect();
    Ok(QState::pure_unchecked(
        RegisterShape::qubits(n)?,
        SymVector::from_complex_slice(&amps),
    ))
}

/// Result of one test case execution.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub index: usize,
    pub fidelity: f64,
    pub passed: bool,
}

/// Suite execution report.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub cases: Vec<CaseResult>,
    pub all_passed: bool,
}

/// Run a suite of cases against a circuit; symbolic inputs/expectations are
/// bound first. Case executions are independent and run in parallel;
/// results aggregate by case index.
pub fn run_suite(circuit: &Circuit, cases: &[TestCase], binding: &Binding) -> Result<SuiteReport> {
    let results: Result<Vec<CaseResult>> = cases
        .par_iter()
        .enumerate()
        .map(|(index, case)| {
            let input = case.input.substitute(binding)?;
            let output = apply_circuit(circuit, &input)?;
            let f = match &case.expected {
                Expected::State(expected) => {
                    let expected = expected.substitute(binding)?;
                    fidelity(&output, &expected)?
                }
                Expected::Distribution(dist) => {
                    // compare Born probabilities by total variation
                    let StateBody::Pure(v) = output.body() else {
                        return Err(Error::shape(
                            "distribution cases need pure outputs".to_string(),
                        ));
                    };
                    let amps = v.to_numeric()?;
                    let n = circuit.num_qubits();
                    let mut tv = 0.0;
                    for (idx, amp) in amps.iter().enumerate() {
                        let key = crate::backend::bitstring(idx, n);
                        let expected_p = match dist.get(&key) {
                            Some(e) => e.substitute(binding)?.to_complex()?.re,
                            None => 0.0,
                        };
                        tv += (amp.norm_sqr() - expected_p).abs();
                    }
                    1.0 - tv / 2.0
                }
            };
            Ok(CaseResult {
                index,
                fidelity: f,
                passed: f >= 1.0 - case.tolerance,
            })
        })
        .collect();
    let mut results = results?;
    results.sort_by_key(|r| r.index);
    let all_passed = results.iter().all(|r| r.passed);
    Ok(SuiteReport { cases: results, all_passed })
}

/// Equivalence-check method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivMethod {
    ExactMatrix,
    RandomizedStates,
    Symbolic,
}

/// Concrete input reproducing a discrepancy, with the parameter binding
/// used when the circuits were symbolic.
#[derive(Clone, Debug)]
pub struct Witness {
    pub input: QState,
    pub binding: Option<Binding>,
    pub fidelity_deficit: f64,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Equivalent,
    EquivalentUpToGlobalPhase,
    Distinct(Witness),
}

impl Verdict {
    /// Equivalence class ignoring the witness payload.
    pub fn class(&self) -> &'static str {
        match self {
            Verdict::Equivalent => "equivalent",
            Verdict::EquivalentUpToGlobalPhase => "equivalent_up_to_global_phase",
            Verdict::Distinct(_) => "distinct",
        }
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    pub method: EquivMethod,
}

/// Decide whether two circuits implement the same operation.
///
/// * `ExactMatrix` (width <= 10): dense unitaries compared entrywise, then
///   up to a global phase (U1†U2 close to e^{i phi} I with phi read off the
///   first nonzero diagonal entry).
/// * `RandomizedStates`: `trials` Haar inputs; any output pair with
///   fidelity below 1 - 1e-9 yields a distinct verdict with that witness.
/// * `Symbolic` (width <= 5): canonical symbolic unitaries compared
///   structurally, falling back to numeric sampling of the free symbols at
///   20 points when structural equality fails.
pub fn check_equivalence(
    c1: &Circuit,
    c2: &Circuit,
    method: EquivMethod,
    trials: usize,
    src: &mut dyn EntropySource,
) -> Result<EquivalenceReport> {
    if c1.num_qubits() != c2.num_qubits() {
        return Err(Error::WidthMismatch(c1.num_qubits(), c2.num_qubits()));
    }
    let verdict = match method {
        EquivMethod::ExactMatrix => exact_matrix_verdict(c1, c2, None, src)?,
        EquivMethod::RandomizedStates => randomized_verdict(c1, c2, trials.max(1), src)?,
        EquivMethod::Symbolic => symbolic_verdict(c1, c2, src)?,
    };
    Ok(EquivalenceReport { verdict, method })
}

fn unitaries_phase_relation(u1: &CMatrix, u2: &CMatrix) -> Option<bool> {
    // Some(true): entrywise equal; Some(false): equal up to global phase
    if numeric::max_abs_diff(u1, u2) <= EQUIVALENCE_TOL {
        return Some(true);
    }
    let d = u1.adjoint() * u2;
    let dim = d.nrows();
    let phi = (0..dim)
        .map(|k| d[(k, k)])
        .find(|z| z.norm() > 0.5)?;
    let phase = phi / phi.norm();
    let target = CMatrix::identity(dim, dim).map(|z| z * phase);
    if numeric::max_abs_diff(&d, &target) <= EQUIVALENCE_TOL * (dim as f64).sqrt() {
        Some(false)
    } else {
        None
    }
}

fn exact_matrix_verdict(
    c1: &Circuit,
    c2: &Circuit,
    binding: Option<&Binding>,
    src: &mut dyn EntropySource,
) -> Result<Verdict> {
    let n = c1.num_qubits();
    if n > EXACT_MATRIX_LIMIT {
        return Err(Error::SizeLimit(format!(
            "exact-matrix equivalence limited to {EXACT_MATRIX_LIMIT} qubits, got {n}"
        )));
    }
    let (b1, b2) = match binding {
        Some(b) => (c1.bind(b)?, c2.bind(b)?),
        None => (c1.clone(), c2.clone()),
    };
    let u1 = circuit_unitary(&b1)?.to_numeric()?;
    let u2 = circuit_unitary(&b2)?.to_numeric()?;
    match unitaries_phase_relation(&u1, &u2) {
        Some(true) => Ok(Verdict::Equivalent),
        Some(false) => Ok(Verdict::EquivalentUpToGlobalPhase),
        None => {
            let witness = find_witness(&b1, &b2, src)?;
            Ok(Verdict::Distinct(Witness {
                binding: binding.cloned(),
                ..witness
            }))
        }
    }
}

/// Search for a state whose outputs through the two circuits differ: basis
/// states first (preferred as witnesses), then Haar states, which expose a
/// difference almost surely.
fn find_witness(c1: &Circuit, c2: &Circuit, src: &mut dyn EntropySource) -> Result<Witness> {
    let n = c1.num_qubits();
    let shape = RegisterShape::qubits(n)?;
    let mut best: Option<Witness> = None;
    for b in 0..(1usize << n) {
        let input = QState::basis(shape.clone(), b)?;
        let f = fidelity(&apply_circuit(c1, &input)?, &apply_circuit(c2, &input)?)?;
        if 1.0 - f > EQUIVALENCE_TOL {
            let w = Witness { input, binding: None, fidelity_deficit: 1.0 - f };
            if best.as_ref().is_none_or(|b| w.fidelity_deficit > b.fidelity_deficit) {
                best = Some(w);
            }
        }
    }
    if let Some(w) = best {
        return Ok(w);
    }
    for _ in 0..64 {
        let input = haar_state(n, src)?;
        let f = fidelity(&apply_circuit(c1, &input)?, &apply_circuit(c2, &input)?)?;
        if 1.0 - f > EQUIVALENCE_TOL {
            return Ok(Witness { input, binding: None, fidelity_deficit: 1.0 - f });
        }
    }
    Err(Error::domain(
        "matrices differ but no witness state found; circuits are numerically borderline"
            .to_string(),
    ))
}

fn randomized_verdict(
    c1: &Circuit,
    c2: &Circuit,
    trials: usize,
    src: &mut dyn EntropySource,
) -> Result<Verdict> {
    let n = c1.num_qubits();
    let mut entrywise_equal = true;
    for _ in 0..trials {
        let input = haar_state(n, src)?;
        let o1 = apply_circuit(c1, &input)?;
        let o2 = apply_circuit(c2, &input)?;
        let f = fidelity(&o1, &o2)?;
        if 1.0 - f > EQUIVALENCE_TOL {
            return Ok(Verdict::Distinct(Witness {
                input,
                binding: None,
                fidelity_deficit: 1.0 - f,
            }));
        }
        let (StateBody::Pure(v1), StateBody::Pure(v2)) = (o1.body(), o2.body()) else {
            continue;
        };
        if (v1.to_numeric()? - v2.to_numeric()?).norm() > EQUIVALENCE_TOL {
            entrywise_equal = false;
        }
    }
    Ok(if entrywise_equal {
        Verdict::Equivalent
    } else {
        Verdict::EquivalentUpToGlobalPhase
    })
}

fn symbolic_verdict(
    c1: &Circuit,
    c2: &Circuit,
    src: &mut dyn EntropySource,
) -> Result<Verdict> {
    let n = c1.num_qubits();
    if n > SYMBOLIC_METHOD_LIMIT {
        return Err(Error::SizeLimit(format!(
            "symbolic equivalence limited to {SYMBOLIC_METHOD_LIMIT} qubits, got {n}"
        )));
    }
    let u1 = circuit_unitary(c1)?.simplify();
    let u2 = circuit_unitary(c2)?.simplify();
    if u1 == u2 {
        return Ok(Verdict::Equivalent);
    }
    // sound-but-incomplete structural check failed: sample the free symbols
    let mut names: Vec<String> = c1.free_symbols().into_iter().collect();
    for s in c2.free_symbols() {
        if !names.contains(&s) {
            names.push(s);
        }
    }
    let points = if names.is_empty() { 1 } else { 20 };
    let mut saw_phase_only = false;
    for _ in 0..points {
        let mut binding = Binding::new();
        for name in &names {
            let v = (src.next_uniform()? * 2.0 - 1.0) * std::f64::consts::PI;
            binding.bind_real(name, v)?;
        }
        match exact_matrix_verdict(c1, c2, Some(&binding), src)? {
            Verdict::Equivalent => {}
            Verdict::EquivalentUpToGlobalPhase => saw_phase_only = true,
            Verdict::Distinct(w) => return Ok(Verdict::Distinct(w)),
        }
    }
    Ok(if saw_phase_only {
        Verdict::EquivalentUpToGlobalPhase
    } else {
        Verdict::Equivalent
    })
}

/// Re-run a witness through both circuits and return the fidelity deficit
/// it reproduces.
pub fn replay_witness(c1: &Circuit, c2: &Circuit, witness: &Witness) -> Result<f64> {
    let (b1, b2) = match &witness.binding {
        Some(b) => (c1.bind(b)?, c2.bind(b)?),
        None => (c1.clone(), c2.clone()),
    };
    let o1 = apply_circuit(&b1, &witness.input)?;
    let o2 = apply_circuit(&b2, &witness.input)?;
    Ok(1.0 - fidelity(&o1, &o2)?)
}

/// Per-case subsystem comparison result.
#[derive(Clone, Debug)]
pub struct SubsystemCaseResult {
    pub index: usize,
    pub fidelity: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct SubsystemReport {
    pub cases: Vec<SubsystemCaseResult>,
    pub all_passed: bool,
}

/// Partial testing: run each case, reduce the output onto `keep`, and
/// compare against the expected reduced state by fidelity. Case expected
/// states must be declared on the kept subsystems only.
pub fn subsystem_test(
    circuit: &Circuit,
    keep: &[usize],
    cases: &[TestCase],
    binding: &Binding,
) -> Result<SubsystemReport> {
    let kept_dim: usize = 1usize << keep.len();
    let mut results = Vec::with_capacity(cases.len());
    for (index, case) in cases.iter().enumerate() {
        let Expected::State(expected) = &case.expected else {
            return Err(Error::shape(
                "subsystem tests compare reduced states, not distributions".to_string(),
            ));
        };
        if expected.total_dim() != kept_dim {
            return Err(Error::shape(format!(
                "expected state dim {} does not match kept subsystems dim {kept_dim}",
                expected.total_dim()
            )));
        }
        let input = case.input.substitute(binding)?;
        let output = apply_circuit(circuit, &input)?;
        let reduced = output.partial_trace(keep)?;
        let expected = expected.substitute(binding)?;
        let f = fidelity(&reduced, &expected)?;
        results.push(SubsystemCaseResult {
            index,
            fidelity: f,
            passed: f >= 1.0 - case.tolerance,
        });
    }
    let all_passed = results.iter().all(|r| r.passed);
    Ok(SubsystemReport { cases: results, all_passed })
}

/// Mutation operators for fault-injection studies (gate substitution within
/// {X, Y, Z, H, S, T}, control removal, adjacent-gate swap).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutationOp {
    GateSubstitution,
    ControlRemoval,
    AdjacentSwap,
}

const SUBSTITUTION_SET: [BuiltinGate; 6] = [
    BuiltinGate::X,
    BuiltinGate::Y,
    BuiltinGate::Z,
    BuiltinGate::H,
    BuiltinGate::S,
    BuiltinGate::T,
];

/// Apply one mutation; returns None when the operator does not apply to
/// the circuit (no eligible gate).
pub fn mutate(
    circuit: &Circuit,
    op: MutationOp,
    src: &mut dyn EntropySource,
) -> Result<Option<Circuit>> {
    let gates = circuit.gates();
    if gates.is_empty() {
        return Ok(None);
    }
    let pick = |src: &mut dyn EntropySource, n: usize| -> Result<usize> {
        Ok((src.next_uniform()? * n as f64) as usize % n)
    };
    match op {
        MutationOp::GateSubstitution => {
            let eligible: Vec<usize> = gates
                .iter()
                .enumerate()
                .filter(|(_, g)| {
                    matches!(g.payload(), GatePayload::Builtin(b) if SUBSTITUTION_SET.contains(b))
                })
                .map(|(i, _)| i)
                .collect();
            if eligible.is_empty() {
                return Ok(None);
            }
            let idx = eligible[pick(src, eligible.len())?];
            let current = match gates[idx].payload() {
                GatePayload::Builtin(b) => *b,
                GatePayload::Custom(_) => unreachable!(),
            };
            let replacement = loop {
                let cand = SUBSTITUTION_SET[pick(src, SUBSTITUTION_SET.len())?];
                if cand != current {
                    break cand;
                }
            };
            let new_gate = GateApp::builtin(
                replacement,
                gates[idx].targets(),
                gates[idx].controls(),
                vec![],
            )?;
            Ok(Some(circuit.with_gate_replaced(idx, new_gate)?))
        }
        MutationOp::ControlRemoval => {
            let eligible: Vec<usize> = gates
                .iter()
                .enumerate()
                .filter(|(_, g)| {
                    !g.controls().is_empty()
                        || matches!(
                            g.payload(),
                            GatePayload::Builtin(BuiltinGate::CNOT | BuiltinGate::CZ)
                        )
                })
                .map(|(i, _)| i)
                .collect();
            if eligible.is_empty() {
                return Ok(None);
            }
            let idx = eligible[pick(src, eligible.len())?];
            let g = &gates[idx];
            let new_gate = if !g.controls().is_empty() {
                let drop = pick(src, g.controls().len())?;
                let controls: Vec<usize> = g
                    .controls()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != drop)
                    .map(|(_, &w)| w)
                    .collect();
                match g.payload() {
                    GatePayload::Builtin(b) => {
                        GateApp::builtin(*b, g.targets(), &controls, g.params().to_vec())?
                    }
                    GatePayload::Custom(u) => {
                        GateApp::custom(g.name(), u.clone(), g.targets(), &controls)?
                    }
                }
            } else {
                // builtin two-qubit controlled gate: drop to its block action
                let (replacement, target) = match g.payload() {
                    GatePayload::Builtin(BuiltinGate::CNOT) => (BuiltinGate::X, g.targets()[1]),
                    GatePayload::Builtin(BuiltinGate::CZ) => (BuiltinGate::Z, g.targets()[1]),
                    _ => unreachable!(),
                };
                GateApp::builtin(replacement, &[target], &[], vec![])?
            };
            Ok(Some(circuit.with_gate_replaced(idx, new_gate)?))
        }
        MutationOp::AdjacentSwap => {
            if gates.len() < 2 {
                return Ok(None);
            }
            let idx = pick(src, gates.len() - 1)?;
            let mut c = circuit.with_gate_replaced(idx, gates[idx + 1].clone())?;
            c = c.with_gate_replaced(idx + 1, gates[idx].clone())?;
            Ok(Some(c))
        }
    }
}

/// Random circuit over {X, Y, Z, H, S, T, CNOT} plus rotation dressing,
/// sandwiched between Hadamard walls. The opening wall keeps every wire in
/// superposition so injected faults propagate to amplitudes; the closing
/// wall keeps any wire from ending in a diagonal-only tail, which would
/// make late diagonal-gate faults invisible to computational-basis checks;
/// and the non-Clifford rotation angles break the exact Clifford
/// conjugation coincidences that would otherwise turn some substitutions
/// into basis-invisible phase patterns.
pub fn random_circuit(n: usize, num_gates: usize, src: &mut dyn EntropySource) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    for w in 0..n {
        c.h(w)?;
    }
    let pick = |src: &mut dyn EntropySource, k: usize| -> Result<usize> {
        Ok((src.next_uniform()? * k as f64) as usize % k)
    };
    for _ in 0..num_gates {
        let wire = pick(src, n)?;
        match pick(src, 10)? {
            0 => c.push_builtin(BuiltinGate::H, &[wire], &[], vec![])?,
            1 => c.push_builtin(BuiltinGate::X, &[wire], &[], vec![])?,
            2 => c.push_builtin(BuiltinGate::Y, &[wire], &[], vec![])?,
            3 => c.push_builtin(BuiltinGate::Z, &[wire], &[], vec![])?,
            4 => c.push_builtin(BuiltinGate::S, &[wire], &[], vec![])?,
            5 => c.push_builtin(BuiltinGate::T, &[wire], &[], vec![])?,
            6 | 7 => {
                let angle = SymExpr::float(0.1 + 2.9 * src.next_uniform()?);
                if pick(src, 2)? == 0 {
                    c.ry(wire, angle)?;
                } else {
                    c.rx(wire, angle)?;
                }
            }
            _ => {
                if n >= 2 {
                    let other = (wire + 1 + pick(src, n - 1)?) % n;
                    c.cnot(wire, other)?;
                } else {
                    c.push_builtin(BuiltinGate::H, &[wire], &[], vec![])?;
                }
            }
        }
    }
    for w in 0..n {
        c.h(w)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests;
