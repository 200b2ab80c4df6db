//! Execution abstraction: named backends behind a registry, an ideal
//! statevector simulator, a noisy density-matrix simulator, shot sampling,
//! mid-circuit measurement, and classically controlled gates.
//!
//! Measurement is computational-basis only; observable estimation belongs
//! to the variational layer, which compiles basis changes into the circuit.
//! Count keys are bitstrings with wire 0 leftmost.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::channel::{noise_model, NoiseKind};
use crate::circuit::{apply_gate_amplitudes, apply_gate_density, Circuit};
use crate::error::{Error, Result};
use crate::numeric::CMatrix;
use crate::qstate::{QState, RegisterShape, StateBody};
use crate::random::{EntropySource, SeededPrng};
use crate::symexpr::Binding;
use crate::symlinalg::{SymMatrix, SymVector};

/// What a backend can do; checked before dispatch.
#[derive(Clone, Copy, Debug)]
pub struct Capabilities {
    pub max_qubits: usize,
    pub supports_noise: bool,
    pub supports_symbolic: bool,
}

/// One noise channel attached after a specific gate on a specific qubit.
#[derive(Clone, Debug)]
pub struct NoisePlacement {
    pub qubit: usize,
    pub kind: NoiseKind,
    pub param: f64,
    pub after_gate_index: usize,
}

/// Noise specification: explicit placements plus an optional uniform
/// per-gate model applied to each gate's target qubits.
#[derive(Clone, Debug, Default)]
pub struct NoiseSpec {
    pub placements: Vec<NoisePlacement>,
    pub uniform: Option<(NoiseKind, f64)>,
}

impl NoiseSpec {
    pub fn is_empty(&self) -> bool {
        self.placements.is_empty() && self.uniform.is_none()
    }
}

/// Per-run options.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub shots: u64,
    pub seed: u64,
    pub noise: Option<NoiseSpec>,
}

/// Execution record: measurement counts (when shots > 0), the final state
/// when the backend exposes it, and metadata.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub counts: BTreeMap<String, u64>,
    pub final_state: Option<QState>,
    pub metadata: RunMetadata,
}

#[derive(Clone, Debug)]
pub struct RunMetadata {
    pub backend: String,
    pub seed: u64,
    pub shots: u64,
    pub elapsed: Duration,
}

/// An execution target.
pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn capabilities(&self) -> Capabilities;
    fn run(&self, circuit: &Circuit, binding: &Binding, options: &RunOptions) -> Result<RunResult>;
}

/// Run a circuit on a backend after checking that the binding covers every
/// free symbol and the request fits the backend's capabilities.
pub fn qrun(
    backend: &dyn Backend,
    circuit: &Circuit,
    binding: &Binding,
    options: &RunOptions,
) -> Result<RunResult> {
    let caps = backend.capabilities();
    if circuit.num_qubits() > caps.max_qubits {
        return Err(Error::Capability(format!(
            "backend '{}' handles at most {} qubits, circuit has {}",
            backend.name(),
            caps.max_qubits,
            circuit.num_qubits()
        )));
    }
    if options.noise.as_ref().is_some_and(|n| !n.is_empty()) && !caps.supports_noise {
        return Err(Error::Capability(format!(
            "backend '{}' does not support noise",
            backend.name()
        )));
    }
    let bound = circuit.bind(binding)?;
    if !caps.supports_symbolic {
        if let Some(name) = bound.free_symbols().into_iter().next() {
            return Err(Error::UnboundSymbol(name));
        }
    }
    backend.run(&bound, &Binding::new(), options)
}

/// Registry of named backends; the built-ins `sv-ideal` and `dm-noisy` are
/// pre-registered.
pub struct BackendRegistry {
    backends: Vec<Arc<dyn Backend>>,
}

impl Default for BackendRegistry {
    fn default() -> Self {
        let mut reg = BackendRegistry { backends: Vec::new() };
        reg.register(Arc::new(StatevectorBackend)).expect("fresh registry");
        reg.register(Arc::new(DensityMatrixBackend)).expect("fresh registry");
        reg
    }
}

impl BackendRegistry {
    pub fn empty() -> Self {
        BackendRegistry { backends: Vec::new() }
    }

    pub fn register(&mut self, backend: Arc<dyn Backend>) -> Result<()> {
        if self.backends.iter().any(|b| b.name() == backend.name()) {
            return Err(Error::DuplicateName(backend.name().to_string()));
        }
        self.backends.push(backend);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Backend>> {
        self.backends
            .iter()
            .find(|b| b.name() == name)
            .cloned()
            .ok_or_else(|| Error::UnknownBackend(name.to_string()))
    }

    pub fn names(&self) -> Vec<String> {
        self.backends.iter().map(|b| b.name().to_string()).collect()
    }
}

/// Format a basis index as a bitstring, wire 0 leftmost.
pub fn bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|w| if (index >> (n - 1 - w)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Sample `shots` outcomes from a probability vector (inverse-CDF with a
/// binary search per shot).
pub fn sample_distribution(
    probs: &[f64],
    shots: u64,
    n: usize,
    src: &mut dyn EntropySource,
) -> Result<BTreeMap<String, u64>> {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cumulative.push(acc);
    }
    let total = acc.max(f64::MIN_POSITIVE);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u = src.next_uniform()? * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
        *counts.entry(bitstring(idx, n)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Sample measurement outcomes of a statevector.
pub fn sample_amplitudes(
    amps: &[Complex64],
    shots: u64,
    n: usize,
    src: &mut dyn EntropySource,
) -> Result<BTreeMap<String, u64>> {
    let probs: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    sample_distribution(&probs, shots, n, src)
}

fn state_amplitudes(circuit: &Circuit) -> Result<Vec<Complex64>> {
    let n = circuit.num_qubits();
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = Complex64::new(1.0, 0.0);
    for g in circuit.gates() {
        let u = g.block_matrix()?.to_numeric()?;
        apply_gate_amplitudes(&mut amps, &u, g.targets(), g.controls(), n);
    }
    Ok(amps)
}

/// Ideal statevector simulator (`sv-ideal`): gates apply by local tensor
/// contraction, never materializing the full unitary.
pub struct StatevectorBackend;

impl Backend for StatevectorBackend {
    fn name(&self) -> &str {
        "sv-ideal"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            max_qubits: crate::circuit::APPLY_LIMIT,
            supports_noise: false,
            supports_symbolic: false,
        }
    }

    fn run(&self, circuit: &Circuit, binding: &Binding, options: &RunOptions) -> Result<RunResult> {
        let started = Instant::now();
        if options.noise.as_ref().is_some_and(|ns| !ns.is_empty()) {
            return Err(Error::Capability(
                "sv-ideal does not support noise".to_string(),
            ));
        }
        let bound = circuit.bind(binding)?;
        if let Some(name) = bound.free_symbols().into_iter().next() {
            return Err(Error::UnboundSymbol(name));
        }
        let n = bound.num_qubits();
        let amps = state_amplitudes(&bound)?;
        let counts = if options.shots > 0 {
            let mut src = SeededPrng::new(options.seed);
            sample_amplitudes(&amps, options.shots, n, &mut src)?
        } else {
            BTreeMap::new()
        };
        let final_state = QState::pure_unchecked(
            RegisterShape::qubits(n)?,
            SymVector::from_complex_slice(&amps),
        );
        Ok(RunResult {
            counts,
            final_state: Some(final_state),
            metadata: RunMetadata {
                backend: self.name().to_string(),
                seed: options.seed,
                shots: options.shots,
                elapsed: started.elapsed(),
            },
        })
    }
}

/// Apply a single-qubit Kraus channel to a density matrix in place.
fn apply_local_channel(rho: &mut CMatrix, kraus: &[CMatrix], qubit: usize, n: usize) {
    let mut acc = CMatrix::zeros(rho.nrows(), rho.ncols());
    for k in kraus {
        let mut branch = rho.clone();
        apply_gate_density(&mut branch, k, &[qubit], &[], n);
        acc += branch;
    }
    *rho = acc;
}

/// Density-matrix simulator with noise support (`dm-noisy`): interleaves
/// gate conjugation with the channels named in the noise spec and samples
/// from the diagonal.
pub struct DensityMatrixBackend;

pub const DM_MAX_QUBITS: usize = 10;

impl Backend for DensityMatrixBackend {
    fn name(&self) -> &str {
        "dm-noisy"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            max_qubits: DM_MAX_QUBITS,
            supports_noise: true,
            supports_symbolic: false,
        }
    }

    fn run(&self, circuit: &Circuit, binding: &Binding, options: &RunOptions) -> Result<RunResult> {
        let started = Instant::now();
        let bound = circuit.bind(binding)?;
        if let Some(name) = bound.free_symbols().into_iter().next() {
            return Err(Error::UnboundSymbol(name));
        }
        let n = bound.num_qubits();
        if n > DM_MAX_QUBITS {
            return Err(Error::Capability(format!(
                "dm-noisy handles at most {DM_MAX_QUBITS} qubits"
            )));
        }
        let empty = NoiseSpec::default();
        let noise = options.noise.as_ref().unwrap_or(&empty);
        for p in &noise.placements {
            if p.qubit >= n {
                return Err(Error::WireOutOfRange { wire: p.qubit, num_qubits: n });
            }
            if p.after_gate_index >= bound.gates().len().max(1) {
                return Err(Error::IndexOutOfRange {
                    index: p.after_gate_index,
                    dim: bound.gates().len().max(1),
                });
            }
        }
        let kraus_numeric = |kind: &NoiseKind, param: f64| -> Result<Vec<CMatrix>> {
            let ch = noise_model(kind.clone(), crate::symexpr::SymExpr::float(param))?;
            ch.kraus()?.iter().map(|k| k.to_numeric()).collect()
        };

        let dim = 1usize << n;
        let mut rho = CMatrix::zeros(dim, dim);
        rho[(0, 0)] = Complex64::new(1.0, 0.0);
        for (idx, g) in bound.gates().iter().enumerate() {
            let u = g.block_matrix()?.to_numeric()?;
            apply_gate_density(&mut rho, &u, g.targets(), g.controls(), n);
            if let Some((kind, param)) = &noise.uniform {
                let ks = kraus_numeric(kind, *param)?;
                for &t in g.targets() {
                    apply_local_channel(&mut rho, &ks, t, n);
                }
            }
            for p in noise.placements.iter().filter(|p| p.after_gate_index == idx) {
                let ks = kraus_numeric(&p.kind, p.param)?;
                apply_local_channel(&mut rho, &ks, p.qubit, n);
            }
        }
        let counts = if options.shots > 0 {
            let probs: Vec<f64> = (0..dim).map(|k| rho[(k, k)].re).collect();
            let mut src = SeededPrng::new(options.seed);
            sample_distribution(&probs, options.shots, n, &mut src)?
        } else {
            BTreeMap::new()
        };
        let final_state =
            QState::mixed_unchecked(RegisterShape::qubits(n)?, SymMatrix::from_numeric(rho));
        Ok(RunResult {
            counts,
            final_state: Some(final_state),
            metadata: RunMetadata {
                backend: self.name().to_string(),
                seed: options.seed,
                shots: options.shots,
                elapsed: started.elapsed(),
            },
        })
    }
}

/// Named classical bits recorded by mid-circuit measurements.
#[derive(Clone, Debug, Default)]
pub struct ClassicalRegister {
    bits: BTreeMap<String, u8>,
}

impl ClassicalRegister {
    pub fn new() -> Self {
        ClassicalRegister::default()
    }

    pub fn set(&mut self, name: &str, value: u8) {
        self.bits.insert(name.to_string(), value & 1);
    }

    pub fn get(&self, name: &str) -> Result<u8> {
        self.bits
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingClassicalBit(name.to_string()))
    }

    pub fn bits(&self) -> &BTreeMap<String, u8> {
        &self.bits
    }
}

fn numeric_pure(state: &QState) -> Result<Vec<Complex64>> {
    match state.body() {
        StateBody::Pure(v) => Ok(v.to_numeric()?.iter().copied().collect()),
        StateBody::Mixed(_) => Err(Error::shape(
            "operation requires a pure state".to_string(),
        )),
    }
}

/// Apply a numeric gate block to the targeted wires of a state.
pub fn run_gate(u: &SymMatrix, targets: &[usize], state: &QState) -> Result<QState> {
    let n = state.shape().num_subsystems();
    if state.shape().dims().iter().any(|&d| d != 2) {
        return Err(Error::shape("run_gate expects a qubit register".to_string()));
    }
    let block = 1usize << targets.len();
    if u.shape() != (block, block) {
        return Err(Error::shape(format!(
            "gate block {:?} does not act on {} wire(s)",
            u.shape(),
            targets.len()
        )));
    }
    let nu = u.to_numeric()?;
    match state.body() {
        StateBody::Pure(_) => {
            let mut amps = numeric_pure(state)?;
            apply_gate_amplitudes(&mut amps, &nu, targets, &[], n);
            Ok(QState::pure_unchecked(
                state.shape().clone(),
                SymVector::from_complex_slice(&amps),
            ))
        }
        StateBody::Mixed(m) => {
            let mut rho = m.to_numeric()?;
            apply_gate_density(&mut rho, &nu, targets, &[], n);
            Ok(QState::mixed_unchecked(
                state.shape().clone(),
                SymMatrix::from_numeric(rho),
            ))
        }
    }
}

/// Apply the gate only when the referenced classical bit is 1.
pub fn run_cgate(
    u: &SymMatrix,
    targets: &[usize],
    record: &ClassicalRegister,
    bit: &str,
    state: &QState,
) -> Result<QState> {
    if record.get(bit)? == 1 {
        run_gate(u, targets, state)
    } else {
        Ok(state.clone())
    }
}

/// Mid-circuit measurement of one wire in the computational basis,
/// collapsing per the Born rule with entropy from `src`. Returns the
/// outcome bit and the collapsed normalized state.
pub fn measure(
    state: &QState,
    wire: usize,
    src: &mut dyn EntropySource,
) -> Result<(u8, QState)> {
    let (p1, _) = branch_probabilities(state, wire)?;
    let outcome = if src.next_uniform()? < p1 { 1 } else { 0 };
    let (_, collapsed) = postselect(state, wire, outcome)?;
    Ok((outcome, collapsed))
}

/// Deterministic measurement branch: probability of the outcome and the
/// collapsed normalized state.
pub fn postselect(state: &QState, wire: usize, outcome: u8) -> Result<(f64, QState)> {
    let n = state.shape().num_subsystems();
    if wire >= n {
        return Err(Error::WireOutOfRange { wire, num_qubits: n });
    }
    let mask = 1usize << (n - 1 - wire);
    match state.body() {
        StateBody::Pure(_) => {
            let mut amps = numeric_pure(state)?;
            let prob: f64 = amps
                .iter()
                .enumerate()
                .filter(|(idx, _)| ((idx & mask != 0) as u8) == outcome)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            if prob <= 1e-15 {
                return Ok((0.0, state.clone()));
            }
            let scale = prob.sqrt();
            for (idx, a) in amps.iter_mut().enumerate() {
                if ((idx & mask != 0) as u8) == outcome {
                    *a /= scale;
                } else {
                    *a = Complex64::new(0.0, 0.0);
                }
            }
            Ok((
                prob,
                QState::pure_unchecked(
                    state.shape().clone(),
                    SymVector::from_complex_slice(&amps),
                ),
            ))
        }
        StateBody::Mixed(m) => {
            let rho = m.to_numeric()?;
            let dim = rho.nrows();
            let keep = |idx: usize| ((idx & mask != 0) as u8) == outcome;
            let mut projected = CMatrix::zeros(dim, dim);
            let mut prob = 0.0;
            for r in 0..dim {
                for c in 0..dim {
                    if keep(r) && keep(c) {
                        projected[(r, c)] = rho[(r, c)];
                    }
                }
                if keep(r) {
                    prob += rho[(r, r)].re;
                }
            }
            if prob <= 1e-15 {
                return Ok((0.0, state.clone()));
            }
            let normalized = projected.map(|z| z / prob);
            Ok((
                prob,
                QState::mixed_unchecked(
                    state.shape().clone(),
                    SymMatrix::from_numeric(normalized),
                ),
            ))
        }
    }
}

fn branch_probabilities(state: &QState, wire: usize) -> Result<(f64, f64)> {
    let n = state.shape().num_subsystems();
    if wire >= n {
        return Err(Error::WireOutOfRange { wire, num_qubits: n });
    }
    let mask = 1usize << (n - 1 - wire);
    let p1 = match state.body() {
        StateBody::Pure(_) => numeric_pure(state)?
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum(),
        StateBody::Mixed(m) => {
            let rho = m.to_numeric()?;
            (0..rho.nrows())
                .filter(|idx| idx & mask != 0)
                .map(|idx| rho[(idx, idx)].re)
                .sum()
        }
    };
    Ok((p1, 1.0 - p1))
}

#[cfg(test)]
mod tests;
