//! Gate and circuit construction: embedding local unitaries into registers,
//! controlled gates, register permutations, and the QFT/QAOA templates.
//!
//! Wire 0 is the most significant bit in state indexing, matching the
//! Kronecker convention fixed in [`crate::qstate`]. The bit of wire `w` in
//! an n-qubit basis index has weight `2^(n-1-w)`.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::CMatrix;
use crate::qstate::{QState, StateBody};
use crate::symexpr::{Binding, SymExpr};
use crate::symlinalg::{hadamard_exact, SymMatrix, SymVector};

/// Widest register for which dense 2^n x 2^n unitaries are materialized.
pub const DENSE_UNITARY_LIMIT: usize = 12;
/// Widest register for gate-local state application.
pub const APPLY_LIMIT: usize = 24;

/// The builtin gate library. Everything else enters circuits as an explicit
/// unitary payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinGate {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    RX,
    RY,
    RZ,
    P,
    CNOT,
    CZ,
    SWAP,
}

impl BuiltinGate {
    pub fn from_name(name: &str) -> Option<BuiltinGate> {
        Some(match name.to_ascii_lowercase().as_str() {
            "i" | "id" => BuiltinGate::I,
            "x" => BuiltinGate::X,
            "y" => BuiltinGate::Y,
            "z" => BuiltinGate::Z,
            "h" => BuiltinGate::H,
            "s" => BuiltinGate::S,
            "t" => BuiltinGate::T,
            "rx" => BuiltinGate::RX,
            "ry" => BuiltinGate::RY,
            "rz" => BuiltinGate::RZ,
            "p" | "phase" => BuiltinGate::P,
            "cnot" | "cx" => BuiltinGate::CNOT,
            "cz" => BuiltinGate::CZ,
            "swap" => BuiltinGate::SWAP,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinGate::I => "i",
            BuiltinGate::X => "x",
            BuiltinGate::Y => "y",
            BuiltinGate::Z => "z",
            BuiltinGate::H => "h",
            BuiltinGate::S => "s",
            BuiltinGate::T => "t",
            BuiltinGate::RX => "rx",
            BuiltinGate::RY => "ry",
            BuiltinGate::RZ => "rz",
            BuiltinGate::P => "p",
            BuiltinGate::CNOT => "cnot",
            BuiltinGate::CZ => "cz",
            BuiltinGate::SWAP => "swap",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            BuiltinGate::CNOT | BuiltinGate::CZ | BuiltinGate::SWAP => 2,
            _ => 1,
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            BuiltinGate::RX | BuiltinGate::RY | BuiltinGate::RZ | BuiltinGate::P => 1,
            _ => 0,
        }
    }

    /// True for gates of rotation form exp(-i theta P / 2) up to global
    /// phase, which admit the parameter-shift rule.
    pub fn is_shift_rotation(&self) -> bool {
        matches!(
            self,
            BuiltinGate::RX | BuiltinGate::RY | BuiltinGate::RZ | BuiltinGate::P
        )
    }

    /// Exact symbolic matrix of the gate.
    pub fn matrix(&self, params: &[SymExpr]) -> Result<SymMatrix> {
        if params.len() != self.param_count() {
            return Err(Error::domain(format!(
                "gate '{}' takes {} parameter(s), got {}",
                self.name(),
                self.param_count(),
                params.len()
            )));
        }
        let i = SymExpr::imaginary();
        let zero = SymExpr::zero();
        let one = SymExpr::one();
        Ok(match self {
            BuiltinGate::I => SymMatrix::identity_exact(2),
            BuiltinGate::X => SymMatrix::from_entries(
                2,
                2,
                vec![zero.clone(), one.clone(), one.clone(), zero.clone()],
            ),
            BuiltinGate::Y => SymMatrix::from_entries(
                2,
                2,
                vec![zero.clone(), -i.clone(), i.clone(), zero.clone()],
            ),
            BuiltinGate::Z => SymMatrix::from_entries(
                2,
                2,
                vec![one.clone(), zero.clone(), zero.clone(), -one.clone()],
            ),
            BuiltinGate::H => hadamard_exact(),
            BuiltinGate::S => SymMatrix::from_entries(
                2,
                2,
                vec![one.clone(), zero.clone(), zero.clone(), i.clone()],
            ),
            BuiltinGate::T => {
                let phase = (i.clone() * SymExpr::pi() * SymExpr::rational(1, 4)).exp();
                SymMatrix::from_entries(2, 2, vec![one.clone(), zero.clone(), zero.clone(), phase])
            }
            BuiltinGate::RX => {
                let half = params[0].clone() * SymExpr::rational(1, 2);
                let (c, s) = (half.cos(), half.sin());
                SymMatrix::from_entries(
                    2,
                    2,
                    vec![
                        c.clone(),
                        -(i.clone() * s.clone()),
                        -(i.clone() * s),
                        c,
                    ],
                )
            }
            BuiltinGate::RY => {
                let half = params[0].clone() * SymExpr::rational(1, 2);
                let (c, s) = (half.cos(), half.sin());
                SymMatrix::from_entries(2, 2, vec![c.clone(), -s.clone(), s, c])
            }
            BuiltinGate::RZ => {
                let half = i.clone() * params[0].clone() * SymExpr::rational(1, 2);
                SymMatrix::from_entries(
                    2,
                    2,
                    vec![(-half.clone()).exp(), zero.clone(), zero.clone(), half.exp()],
                )
            }
            BuiltinGate::P => SymMatrix::from_entries(
                2,
                2,
                vec![
                    one.clone(),
                    zero.clone(),
                    zero.clone(),
                    (i.clone() * params[0].clone()).exp(),
                ],
            ),
            BuiltinGate::CNOT => {
                let mut entries = vec![SymExpr::zero(); 16];
                for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
                    entries[r * 4 + c] = SymExpr::one();
                }
                SymMatrix::from_entries(4, 4, entries)
            }
            BuiltinGate::CZ => {
                let mut entries = vec![SymExpr::zero(); 16];
                for r in 0..4 {
                    entries[r * 4 + r] = if r == 3 { -SymExpr::one() } else { SymExpr::one() };
                }
                SymMatrix::from_entries(4, 4, entries)
            }
            BuiltinGate::SWAP => {
                let mut entries = vec![SymExpr::zero(); 16];
                for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                    entries[r * 4 + c] = SymExpr::one();
                }
                SymMatrix::from_entries(4, 4, entries)
            }
        })
    }
}

/// Unitary payload of a gate application.
#[derive(Clone, Debug, PartialEq)]
pub enum GatePayload {
    Builtin(BuiltinGate),
    Custom(SymMatrix),
}

/// One gate application: payload, target wires (listed order defines the
/// gate-local tensor order, first target most significant), optional
/// control wires, and symbolic parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GateApp {
    name: String,
    payload: GatePayload,
    targets: Vec<usize>,
    controls: Vec<usize>,
    params: Vec<SymExpr>,
}

impl GateApp {
    pub fn builtin(
        gate: BuiltinGate,
        targets: &[usize],
        controls: &[usize],
        params: Vec<SymExpr>,
    ) -> Result<Self> {
        if targets.len() != gate.arity() {
            return Err(Error::shape(format!(
                "gate '{}' acts on {} wire(s), got {}",
                gate.name(),
                gate.arity(),
                targets.len()
            )));
        }
        if params.len() != gate.param_count() {
            return Err(Error::domain(format!(
                "gate '{}' takes {} parameter(s), got {}",
                gate.name(),
                gate.param_count(),
                params.len()
            )));
        }
        let app = GateApp {
            name: gate.name().to_string(),
            payload: GatePayload::Builtin(gate),
            targets: targets.to_vec(),
            controls: controls.to_vec(),
            params,
        };
        app.check_disjoint()?;
        Ok(app)
    }

    pub fn custom(
        name: &str,
        unitary: SymMatrix,
        targets: &[usize],
        controls: &[usize],
    ) -> Result<Self> {
        let dim = 1usize << targets.len();
        if unitary.shape() != (dim, dim) {
            return Err(Error::shape(format!(
                "custom gate on {} wire(s) needs a {dim}x{dim} matrix, got {:?}",
                targets.len(),
                unitary.shape()
            )));
        }
        let app = GateApp {
            name: name.to_string(),
            payload: GatePayload::Custom(unitary),
            targets: targets.to_vec(),
            controls: controls.to_vec(),
            params: Vec::new(),
        };
        app.check_disjoint()?;
        Ok(app)
    }

    fn check_disjoint(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &w in self.targets.iter().chain(self.controls.iter()) {
            if !seen.insert(w) {
                return Err(Error::DuplicateWire(w));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn payload(&self) -> &GatePayload {
        &self.payload
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    pub fn params(&self) -> &[SymExpr] {
        &self.params
    }

    /// Copy with replaced parameters (used by gradient shifts).
    pub fn with_params(&self, params: Vec<SymExpr>) -> Result<GateApp> {
        match &self.payload {
            GatePayload::Builtin(g) => {
                GateApp::builtin(*g, &self.targets, &self.controls, params)
            }
            GatePayload::Custom(_) => Err(Error::domain(format!(
                "custom gate '{}' has no replaceable parameters",
                self.name
            ))),
        }
    }

    /// Gate-block matrix (2^k x 2^k over the targets).
    pub fn block_matrix(&self) -> Result<SymMatrix> {
        match &self.payload {
            GatePayload::Builtin(g) => g.matrix(&self.params),
            GatePayload::Custom(u) => Ok(u.clone()),
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for p in &self.params {
            out.extend(p.free_symbol_names());
        }
        if let GatePayload::Custom(u) = &self.payload {
            out.extend(u.free_symbols().into_iter().map(|s| s.name().to_string()));
        }
        out
    }

    pub fn substitute(&self, binding: &Binding) -> Result<GateApp> {
        let params: Result<Vec<_>> = self.params.iter().map(|p| p.substitute(binding)).collect();
        let payload = match &self.payload {
            GatePayload::Builtin(g) => GatePayload::Builtin(*g),
            GatePayload::Custom(u) => GatePayload::Custom(u.substitute(binding)?),
        };
        Ok(GateApp {
            name: self.name.clone(),
            payload,
            targets: self.targets.clone(),
            controls: self.controls.clone(),
            params: params?,
        })
    }
}

/// Ordered list of gate applications over an n-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<GateApp>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "circuit needs at least one qubit");
        Circuit { num_qubits, gates: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[GateApp] {
        &self.gates
    }

    pub fn add(&mut self, gate: GateApp) -> Result<()> {
        for &w in gate.targets.iter().chain(gate.controls.iter()) {
            if w >= self.num_qubits {
                return Err(Error::WireOutOfRange { wire: w, num_qubits: self.num_qubits });
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn push_builtin(
        &mut self,
        gate: BuiltinGate,
        targets: &[usize],
        controls: &[usize],
        params: Vec<SymExpr>,
    ) -> Result<()> {
        self.add(GateApp::builtin(gate, targets, controls, params)?)
    }

    pub fn h(&mut self, wire: usize) -> Result<()> {
        self.push_builtin(BuiltinGate::H, &[wire], &[], vec![])
    }

    pub fn x(&mut self, wire: usize) -> Result<()> {
        self.push_builtin(BuiltinGate::X, &[wire], &[], vec![])
    }

    pub fn rx(&mut self, wire: usize, angle: SymExpr) -> Result<()> {
        self.push_builtin(BuiltinGate::RX, &[wire], &[], vec![angle])
    }

    pub fn ry(&mut self, wire: usize, angle: SymExpr) -> Result<()> {
        self.push_builtin(BuiltinGate::RY, &[wire], &[], vec![angle])
    }

    pub fn rz(&mut self, wire: usize, angle: SymExpr) -> Result<()> {
        self.push_builtin(BuiltinGate::RZ, &[wire], &[], vec![angle])
    }

    pub fn phase(&mut self, wire: usize, angle: SymExpr) -> Result<()> {
        self.push_builtin(BuiltinGate::P, &[wire], &[], vec![angle])
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.push_builtin(BuiltinGate::CNOT, &[control, target], &[], vec![])
    }

    pub fn with_gate_replaced(&self, index: usize, gate: GateApp) -> Result<Circuit> {
        let mut c = self.clone();
        if index >= c.gates.len() {
            return Err(Error::IndexOutOfRange { index, dim: c.gates.len() });
        }
        c.gates[index] = gate;
        Ok(c)
    }

    /// Union of parameter names across gates, sorted lexicographically; this
    /// ordering defines parameter vectors everywhere.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for g in &self.gates {
            out.extend(g.free_symbols());
        }
        out
    }

    pub fn is_numeric(&self) -> bool {
        self.free_symbols().is_empty()
    }

    pub fn bind(&self, binding: &Binding) -> Result<Circuit> {
        let gates: Result<Vec<_>> = self.gates.iter().map(|g| g.substitute(binding)).collect();
        Ok(Circuit { num_qubits: self.num_qubits, gates: gates? })
    }
}

fn check_targets(targets: &[usize], controls: &[usize], n: usize) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &w in targets.iter().chain(controls.iter()) {
        if w >= n {
            return Err(Error::WireOutOfRange { wire: w, num_qubits: n });
        }
        if !seen.insert(w) {
            return Err(Error::DuplicateWire(w));
        }
    }
    Ok(())
}

/// Bit of wire `w` inside an n-qubit index (wire 0 most significant).
#[inline]
fn wire_bit(index: usize, wire: usize, n: usize) -> usize {
    (index >> (n - 1 - wire)) & 1
}

/// Gate-local row/column index of a basis index: target bits in listed
/// order, first target most significant.
#[inline]
fn local_index(index: usize, targets: &[usize], n: usize) -> usize {
    let mut out = 0;
    for &t in targets {
        out = (out << 1) | wire_bit(index, t, n);
    }
    out
}

/// Embed `u` on the listed wires (order-sensitive, possibly non-contiguous)
/// with identity elsewhere, producing the full 2^n x 2^n matrix.
pub fn gate(u: &SymMatrix, targets: &[usize], n: usize) -> Result<SymMatrix> {
    cgate(u, targets, &[], n)
}

/// Controlled embedding: `u` acts on the targets when every control wire is
/// 1; identity otherwise.
pub fn cgate(u: &SymMatrix, targets: &[usize], controls: &[usize], n: usize) -> Result<SymMatrix> {
    if n > DENSE_UNITARY_LIMIT {
        return Err(Error::SizeLimit(format!(
            "dense embedding of {n} qubits exceeds the {DENSE_UNITARY_LIMIT}-qubit limit"
        )));
    }
    check_targets(targets, controls, n)?;
    let k = targets.len();
    let block = 1usize << k;
    if u.shape() != (block, block) {
        return Err(Error::shape(format!(
            "gate block {:?} does not act on {k} wire(s)",
            u.shape()
        )));
    }
    let dim = 1usize << n;
    // all wires outside the targets must agree between row and column
    let mut keep = usize::MAX >> (usize::BITS as usize - n);
    for &t in targets {
        keep &= !(1 << (n - 1 - t));
    }
    let rest_mask_equal = move |r: usize, c: usize| (r & keep) == (c & keep);
    let control_mask: usize = controls.iter().map(|&w| 1usize << (n - 1 - w)).sum();
    let controls_all_one = move |idx: usize| idx & control_mask == control_mask;

    if u.is_numeric_repr() {
        let nu = u.to_numeric().expect("numeric repr converts");
        let mut out = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                out[(r, c)] = if !rest_mask_equal(r, c) {
                    Complex64::new(0.0, 0.0)
                } else if !controls_all_one(r) {
                    Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
                } else {
                    nu[(local_index(r, targets, n), local_index(c, targets, n))]
                };
            }
        }
        return Ok(SymMatrix::from_numeric(out));
    }
    Ok(SymMatrix::from_fn(dim, dim, |r, c| {
        if !rest_mask_equal(r, c) {
            SymExpr::zero()
        } else if !controls_all_one(r) {
            if r == c {
                SymExpr::one()
            } else {
                SymExpr::zero()
            }
        } else {
            u.entry(local_index(r, targets, n), local_index(c, targets, n))
        }
    }))
}

/// Permutation matrix moving wire w to wire perm(w):
/// P|b_0 .. b_{n-1}> = |b_{perm^-1(0)} .. b_{perm^-1(n-1)}>.
pub fn permute_register(perm: &[usize], n: usize) -> Result<SymMatrix> {
    if perm.len() != n {
        return Err(Error::NotAPermutation(n));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::NotAPermutation(n));
        }
        seen[p] = true;
    }
    if n > DENSE_UNITARY_LIMIT {
        return Err(Error::SizeLimit(format!(
            "dense permutation on {n} qubits exceeds the {DENSE_UNITARY_LIMIT}-qubit limit"
        )));
    }
    let dim = 1usize << n;
    let mut inverse = vec![0usize; n];
    for (w, &p) in perm.iter().enumerate() {
        inverse[p] = w;
    }
    let mut out = CMatrix::zeros(dim, dim);
    for c in 0..dim {
        let mut r = 0usize;
        for j in 0..n {
            r = (r << 1) | wire_bit(c, inverse[j], n);
        }
        out[(r, c)] = Complex64::new(1.0, 0.0);
    }
    Ok(SymMatrix::from_numeric(out))
}

/// Standard QFT circuit: Hadamard plus controlled-phase ladder per wire,
/// then wire-reversal swaps.
pub fn qft_template(n: usize) -> Circuit {
    assert!(n >= 1);
    let mut c = Circuit::new(n);
    for j in 0..n {
        c.push_builtin(BuiltinGate::H, &[j], &[], vec![]).unwrap();
        for k in j + 1..n {
            // angle pi / 2^(k-j)
            let angle = SymExpr::pi() * SymExpr::rational(1, 1i64 << (k - j));
            c.push_builtin(BuiltinGate::P, &[j], &[k], vec![angle]).unwrap();
        }
    }
    for j in 0..n / 2 {
        c.push_builtin(BuiltinGate::SWAP, &[j, n - 1 - j], &[], vec![]).unwrap();
    }
    c
}

/// Exact QFT matrix, entries omega^{jk} / sqrt(2^n) with
/// omega = exp(2 pi i / 2^n).
pub fn qft_unitary(n: usize) -> Result<SymMatrix> {
    if n > DENSE_UNITARY_LIMIT {
        return Err(Error::SizeLimit(format!(
            "dense QFT on {n} qubits exceeds the {DENSE_UNITARY_LIMIT}-qubit limit"
        )));
    }
    let dim = 1usize << n;
    let norm = SymExpr::rational(1, dim as i64).sqrt();
    Ok(SymMatrix::from_fn(dim, dim, |j, k| {
        let phase_num = ((j * k) % dim) as i64;
        let arg = SymExpr::imaginary()
            * SymExpr::pi()
            * SymExpr::rational(2 * phase_num, dim as i64);
        norm.clone() * arg.exp()
    }))
}

/// Weighted undirected edge.
pub type Edge = (usize, usize, f64);

/// QAOA ansatz: Hadamard wall, then p alternating cost layers
/// (exp(-i gamma_l w Z_u Z_v) per edge, compiled as CNOT / RZ(2 w gamma_l) /
/// CNOT) and mixer layers (RX(2 beta_l) per vertex). Introduces the fresh
/// real symbols gamma_1..gamma_p and beta_1..beta_p.
pub fn qaoa_template(edges: &[Edge], p: usize) -> Result<Circuit> {
    if p < 1 {
        return Err(Error::Graph("QAOA needs at least one layer".into()));
    }
    if edges.is_empty() {
        return Err(Error::Graph("edge list is empty".into()));
    }
    let mut seen = BTreeSet::new();
    let mut n = 0usize;
    for &(u, v, _) in edges {
        if u == v {
            return Err(Error::Graph(format!("self-loop on vertex {u}")));
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(Error::Graph(format!("duplicate edge ({u}, {v})")));
        }
        n = n.max(u + 1).max(v + 1);
    }
    let mut c = Circuit::new(n);
    for w in 0..n {
        c.h(w)?;
    }
    for layer in 1..=p {
        let gamma = SymExpr::symbol(&format!("gamma_{layer}"));
        for &(u, v, w) in edges {
            c.cnot(u, v)?;
            c.rz(v, SymExpr::float(2.0 * w) * gamma.clone())?;
            c.cnot(u, v)?;
        }
        let beta = SymExpr::symbol(&format!("beta_{layer}"));
        for wire in 0..n {
            c.rx(wire, SymExpr::int(2) * beta.clone())?;
        }
    }
    Ok(c)
}

/// Ordered product of the embedded gate matrices (last gate leftmost).
pub fn circuit_unitary(c: &Circuit) -> Result<SymMatrix> {
    circuit_unitary_with_limit(c, DENSE_UNITARY_LIMIT)
}

/// As [`circuit_unitary`] with a caller-chosen width limit.
pub fn circuit_unitary_with_limit(c: &Circuit, limit: usize) -> Result<SymMatrix> {
    let n = c.num_qubits();
    if n > limit {
        return Err(Error::SizeLimit(format!(
            "dense unitary of a {n}-qubit circuit exceeds the {limit}-qubit limit"
        )));
    }
    // seed from the first gate so exact symbolic entries are not
    // contaminated by a float identity
    let mut acc: Option<SymMatrix> = None;
    for g in c.gates() {
        let embedded = cgate(&g.block_matrix()?, g.targets(), g.controls(), n)?;
        acc = Some(match acc {
            None => embedded,
            Some(prev) => embedded.matmul(&prev)?,
        });
    }
    Ok(acc.unwrap_or_else(|| SymMatrix::identity_exact(1 << n)))
}

/// Apply a numeric local gate to packed amplitudes.
pub fn apply_gate_amplitudes(
    amps: &mut [Complex64],
    u: &CMatrix,
    targets: &[usize],
    controls: &[usize],
    n: usize,
) {
    let k = targets.len();
    let block = 1usize << k;
    debug_assert_eq!(u.nrows(), block);
    let dim = 1usize << n;
    debug_assert_eq!(amps.len(), dim);
    let target_masks: Vec<usize> = targets.iter().map(|&t| 1 << (n - 1 - t)).collect();
    let all_targets: usize = target_masks.iter().sum();
    let control_mask: usize = controls.iter().map(|&w| 1usize << (n - 1 - w)).sum();
    let mut gathered = vec![Complex64::new(0.0, 0.0); block];
    for base in 0..dim {
        if base & all_targets != 0 {
            continue; // enumerate each block once, at its all-zero-targets index
        }
        if base & control_mask != control_mask {
            continue; // controls not satisfied: identity
        }
        for pattern in 0..block {
            let mut idx = base;
            for (bit, mask) in target_masks.iter().enumerate() {
                if (pattern >> (k - 1 - bit)) & 1 == 1 {
                    idx |= mask;
                }
            }
            gathered[pattern] = amps[idx];
        }
        for (row, g_row) in u.row_iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, &g) in gathered.iter().enumerate() {
                acc += g_row[col] * g;
            }
            let mut idx = base;
            for (bit, mask) in target_masks.iter().enumerate() {
                if (row >> (k - 1 - bit)) & 1 == 1 {
                    idx |= mask;
                }
            }
            amps[idx] = acc;
        }
    }
}

/// Same as [`apply_gate_amplitudes`] for symbolic amplitude vectors
/// (numeric gate, symbolic state).
fn apply_gate_symbolic(
    amps: &mut [SymExpr],
    u: &SymMatrix,
    targets: &[usize],
    controls: &[usize],
    n: usize,
) {
    let k = targets.len();
    let block = 1usize << k;
    let dim = 1usize << n;
    debug_assert_eq!(amps.len(), dim);
    let target_masks: Vec<usize> = targets.iter().map(|&t| 1 << (n - 1 - t)).collect();
    let all_targets: usize = target_masks.iter().sum();
    let control_mask: usize = controls.iter().map(|&w| 1usize << (n - 1 - w)).sum();
    for base in 0..dim {
        if base & all_targets != 0 || base & control_mask != control_mask {
            continue;
        }
        let index_of = |pattern: usize| {
            let mut idx = base;
            for (bit, mask) in target_masks.iter().enumerate() {
                if (pattern >> (k - 1 - bit)) & 1 == 1 {
                    idx |= mask;
                }
            }
            idx
        };
        let gathered: Vec<SymExpr> = (0..block).map(|p| amps[index_of(p)].clone()).collect();
        for row in 0..block {
            let mut acc = SymExpr::zero();
            for (col, g) in gathered.iter().enumerate() {
                acc = acc + u.entry(row, col) * g.clone();
            }
            amps[index_of(row)] = acc.simplify();
        }
    }
}

/// Apply a numeric local gate to a density matrix: rho -> U rho U†.
pub fn apply_gate_density(
    rho: &mut CMatrix,
    u: &CMatrix,
    targets: &[usize],
    controls: &[usize],
    n: usize,
) {
    let dim = 1usize << n;
    debug_assert_eq!(rho.nrows(), dim);
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    // left multiply: U rho
    for c in 0..dim {
        for r in 0..dim {
            col[r] = rho[(r, c)];
        }
        apply_gate_amplitudes(&mut col, u, targets, controls, n);
        for r in 0..dim {
            rho[(r, c)] = col[r];
        }
    }
    // right multiply by U†: conj(U) applied along rows
    let u_conj = u.map(|z| z.conj());
    for r in 0..dim {
        for c in 0..dim {
            col[c] = rho[(r, c)];
        }
        apply_gate_amplitudes(&mut col, &u_conj, targets, controls, n);
        for c in 0..dim {
            rho[(r, c)] = col[c];
        }
    }
}

/// Apply a fully bound circuit to a state by gate-local application,
/// without materializing the circuit unitary. Symbolic circuits must go
/// through [`circuit_unitary`] after binding.
pub fn apply_circuit(c: &Circuit, state: &QState) -> Result<QState> {
    apply_circuit_with_limit(c, state, APPLY_LIMIT)
}

/// As [`apply_circuit`] with a caller-chosen width limit.
pub fn apply_circuit_with_limit(c: &Circuit, state: &QState, limit: usize) -> Result<QState> {
    let n = c.num_qubits();
    if n > limit {
        return Err(Error::SizeLimit(format!(
            "gate-local application on {n} qubits exceeds the {limit}-qubit limit"
        )));
    }
    if !c.is_numeric() {
        return Err(Error::NotNumeric(format!(
            "circuit has unbound parameters: {:?}; bind them or use circuit_unitary",
            c.free_symbols()
        )));
    }
    if state.shape().dims() != vec![2; n] {
        return Err(Error::shape(format!(
            "state register {:?} is not {n} qubits",
            state.shape().dims()
        )));
    }
    match state.body() {
        StateBody::Pure(v) if v.is_numeric() => {
            let nv = v.to_numeric()?;
            let mut amps: Vec<Complex64> = nv.iter().copied().collect();
            for g in c.gates() {
                let u = g.block_matrix()?.to_numeric()?;
                apply_gate_amplitudes(&mut amps, &u, g.targets(), g.controls(), n);
            }
            Ok(QState::pure_unchecked(
                state.shape().clone(),
                SymVector::from_complex_slice(&amps),
            ))
        }
        StateBody::Pure(v) => {
            let mut amps: Vec<SymExpr> = (0..v.dim()).map(|k| v.entry(k)).collect();
            for g in c.gates() {
                let u = g.block_matrix()?;
                apply_gate_symbolic(&mut amps, &u, g.targets(), g.controls(), n);
            }
            Ok(QState::pure_unchecked(
                state.shape().clone(),
                SymVector::from_entries(amps),
            ))
        }
        StateBody::Mixed(m) => {
            if !m.is_numeric() {
                return Err(Error::NotNumeric(
                    "gate-local application on symbolic density matrices is unsupported; \
                     bind the state first"
                        .into(),
                ));
            }
            let mut rho = m.to_numeric()?;
            for g in c.gates() {
                let u = g.block_matrix()?.to_numeric()?;
                apply_gate_density(&mut rho, &u, g.targets(), g.controls(), n);
            }
            Ok(QState::mixed_unchecked(
                state.shape().clone(),
                SymMatrix::from_numeric(rho),
            ))
        }
    }
}
