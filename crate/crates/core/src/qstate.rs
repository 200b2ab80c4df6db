//! Quantum states over multi-subsystem registers and the structural maps on
//! them: partial trace, partial transposition, reshuffling, and fidelity.
//!
//! # Index convention
//!
//! Subsystem 0 is the leftmost, most significant factor in the Kronecker /
//! row-major convention used across the toolkit. For a two-qubit register
//! the composite index decomposes as:
//!
//! ```text
//! index | subsystem 0 | subsystem 1 | basis label
//!   0   |      0      |      0      |   |00>
//!   1   |      0      |      1      |   |01>
//!   2   |      1      |      0      |   |10>
//!   3   |      1      |      1      |   |11>
//! ```
//!
//! so `index = q0 * 2 + q1`, and a gate on subsystem 0 acts on the
//! high-order bit. Every module (circuits, channels, backends) shares this
//! convention.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{self, CMatrix};
use crate::symexpr::{Binding, SymExpr};
use crate::symlinalg::{SymMatrix, SymVector};

/// Tolerance for the numeric state invariants (norm, hermiticity, trace,
/// positivity floor).
pub const STATE_TOL: f64 = 1e-9;

/// Ordered list of subsystem dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterShape {
    dims: Vec<usize>,
}

impl RegisterShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::shape("register needs at least one subsystem"));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::shape("every subsystem dimension must be >= 2"));
        }
        Ok(RegisterShape { dims })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        RegisterShape::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Decompose a composite index, leftmost subsystem most significant.
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (k, &d) in self.dims.iter().enumerate().rev() {
            out[k] = index % d;
            index /= d;
        }
        out
    }

    pub fn ravel(&self, parts: &[usize]) -> usize {
        debug_assert_eq!(parts.len(), self.dims.len());
        let mut index = 0;
        for (k, &d) in self.dims.iter().enumerate() {
            debug_assert!(parts[k] < d);
            index = index * d + parts[k];
        }
        index
    }

    fn check_subsystems(&self, subsystems: &[usize]) -> Result<()> {
        for &s in subsystems {
            if s >= self.dims.len() {
                return Err(Error::IndexOutOfRange { index: s, dim: self.dims.len() });
            }
        }
        Ok(())
    }
}

/// Pure statevector or mixed density matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum StateBody {
    Pure(SymVector),
    Mixed(SymMatrix),
}

/// A quantum state over a register.
///
/// Numeric states are validated on construction (unit norm for pure states;
/// hermiticity, unit trace, and positivity for mixed states). Symbolic
/// states carry the same invariants as proof obligations and are checked by
/// [`QState::validate_numeric`] once fully bound.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    shape: RegisterShape,
    body: StateBody,
}

impl QState {
    pub fn pure(shape: RegisterShape, v: SymVector) -> Result<Self> {
        if v.dim() != shape.total_dim() {
            return Err(Error::shape(format!(
                "statevector of dim {} on register of total dim {}",
                v.dim(),
                shape.total_dim()
            )));
        }
        let state = QState { shape, body: StateBody::Pure(v) };
        if state.is_fully_numeric() {
            state.validate_numeric()?;
        }
        Ok(state)
    }

    pub fn mixed(shape: RegisterShape, m: SymMatrix) -> Result<Self> {
        let d = shape.total_dim();
        if m.shape() != (d, d) {
            return Err(Error::shape(format!(
                "density matrix {:?} on register of total dim {d}",
                m.shape()
            )));
        }
        let state = QState { shape, body: StateBody::Mixed(m) };
        if state.is_fully_numeric() {
            state.validate_numeric()?;
        }
        Ok(state)
    }

    /// Construct without invariant validation (normalization deferred to the
    /// caller, e.g. mid-measurement branches).
    pub fn pure_unchecked(shape: RegisterShape, v: SymVector) -> Self {
        QState { shape, body: StateBody::Pure(v) }
    }

    pub fn mixed_unchecked(shape: RegisterShape, m: SymMatrix) -> Self {
        QState { shape, body: StateBody::Mixed(m) }
    }

    /// Computational basis state |index>.
    pub fn basis(shape: RegisterShape, index: usize) -> Result<Self> {
        let dim = shape.total_dim();
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let v = crate::symlinalg::ket(index, dim)?;
        Ok(QState { shape, body: StateBody::Pure(v) })
    }

    pub fn zero_qubits(n: usize) -> Result<Self> {
        QState::basis(RegisterShape::qubits(n)?, 0)
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn body(&self) -> &StateBody {
        &self.body
    }

    pub fn total_dim(&self) -> usize {
        self.shape.total_dim()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.body, StateBody::Pure(_))
    }

    pub fn is_fully_numeric(&self) -> bool {
        match &self.body {
            StateBody::Pure(v) => v.is_numeric(),
            StateBody::Mixed(m) => m.is_numeric(),
        }
    }

    /// Density-matrix form (|psi><psi| for pure states).
    pub fn density(&self) -> SymMatrix {
        match &self.body {
            StateBody::Pure(v) => v.outer(),
            StateBody::Mixed(m) => m.clone(),
        }
    }

    pub fn to_mixed(&self) -> QState {
        QState {
            shape: self.shape.clone(),
            body: StateBody::Mixed(self.density()),
        }
    }

    pub fn substitute(&self, binding: &Binding) -> Result<QState> {
        let body = match &self.body {
            StateBody::Pure(v) => StateBody::Pure(v.substitute(binding)?),
            StateBody::Mixed(m) => StateBody::Mixed(m.substitute(binding)?),
        };
        Ok(QState { shape: self.shape.clone(), body })
    }

    /// Check the numeric state invariants: unit norm (pure), or
    /// hermiticity, unit trace, and eigenvalues above -[`STATE_TOL`]
    /// (mixed). Fails with `NotNumeric` on unbound symbolic states.
    pub fn validate_numeric(&self) -> Result<()> {
        match &self.body {
            StateBody::Pure(v) => {
                let nv = v.to_numeric()?;
                let norm = nv.norm();
                if (norm - 1.0).abs() > STATE_TOL {
                    return Err(Error::domain(format!(
                        "statevector norm {norm} deviates from 1 beyond {STATE_TOL}"
                    )));
                }
            }
            StateBody::Mixed(m) => {
                let nm = m.to_numeric()?;
                let herm = numeric::hermiticity_deviation(&nm);
                if herm > STATE_TOL {
                    return Err(Error::domain(format!(
                        "density matrix hermiticity deviation {herm}"
                    )));
                }
                let trace: Complex64 = nm.diagonal().iter().sum();
                if (trace - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
                    return Err(Error::domain(format!("density matrix trace {trace}")));
                }
                let (eigs, _) = numeric::hermitian_eigen(&nm);
                if let Some(&min) = eigs.first() {
                    if min < -STATE_TOL {
                        return Err(Error::domain(format!(
                            "density matrix has negative eigenvalue {min}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Reduced state on the kept subsystems (original order preserved).
    /// Pure inputs are promoted to density form first.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<QState> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        self.shape.check_subsystems(keep)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();

        let rho = self.density();
        let reduced = partial_trace_matrix(&rho, &self.shape, &keep)?;
        let kept_dims: Vec<usize> = keep.iter().map(|&k| self.shape.dims()[k]).collect();
        Ok(QState {
            shape: RegisterShape::new(kept_dims)?,
            body: StateBody::Mixed(reduced),
        })
    }

    /// Transpose the listed subsystems of the density form. The result is
    /// Hermitian but possibly non-positive (partial transposition is not a
    /// physical map), so it is returned as a plain matrix.
    pub fn partial_transpose(&self, subsystems: &[usize]) -> Result<SymMatrix> {
        self.shape.check_subsystems(subsystems)?;
        let mut subs = subsystems.to_vec();
        subs.sort_unstable();
        subs.dedup();
        partial_transpose_matrix(&self.density(), &self.shape, &subs)
    }
}

pub(crate) fn partial_trace_matrix(
    rho: &SymMatrix,
    shape: &RegisterShape,
    keep: &[usize],
) -> Result<SymMatrix> {
    let m = shape.num_subsystems();
    let traced: Vec<usize> = (0..m).filter(|k| !keep.contains(k)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| shape.dims()[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| shape.dims()[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let trace_count: usize = traced_dims.iter().product::<usize>().max(1);

    let kept_shape = RegisterShape::new(kept_dims)?;
    let compose = |kept_parts: &[usize], traced_parts: &[usize]| -> usize {
        let mut parts = vec![0; m];
        for (slot, &sys) in keep.iter().enumerate() {
            parts[sys] = kept_parts[slot];
        }
        for (slot, &sys) in traced.iter().enumerate() {
            parts[sys] = traced_parts[slot];
        }
        shape.ravel(&parts)
    };
    let traced_shape = if traced.is_empty() {
        None
    } else {
        Some(RegisterShape::new(traced_dims)?)
    };

    if rho.is_numeric_repr() {
        let num = rho.to_numeric().expect("numeric repr converts");
        let mut out = CMatrix::zeros(out_dim, out_dim);
        for i in 0..out_dim {
            let pi = kept_shape.unravel(i);
            for j in 0..out_dim {
                let pj = kept_shape.unravel(j);
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..trace_count {
                    let pt = match &traced_shape {
                        Some(ts) => ts.unravel(t),
                        None => Vec::new(),
                    };
                    acc += num[(compose(&pi, &pt), compose(&pj, &pt))];
                }
                out[(i, j)] = acc;
            }
        }
        return Ok(SymMatrix::from_numeric(out));
    }

    Ok(SymMatrix::from_fn(out_dim, out_dim, |i, j| {
        let pi = kept_shape.unravel(i);
        let pj = kept_shape.unravel(j);
        let mut acc = SymExpr::zero();
        for t in 0..trace_count {
            let pt = match &traced_shape {
                Some(ts) => ts.unravel(t),
                None => Vec::new(),
            };
            acc = acc + rho.entry(compose(&pi, &pt), compose(&pj, &pt));
        }
        acc
    }))
}

fn partial_transpose_matrix(
    rho: &SymMatrix,
    shape: &RegisterShape,
    subsystems: &[usize],
) -> Result<SymMatrix> {
    let dim = shape.total_dim();
    debug_assert_eq!(rho.shape(), (dim, dim));
    let swap = |r: usize, c: usize| -> (usize, usize) {
        let mut pr = shape.unravel(r);
        let mut pc = shape.unravel(c);
        for &s in subsystems {
            std::mem::swap(&mut pr[s], &mut pc[s]);
        }
        (shape.ravel(&pr), shape.ravel(&pc))
    };
    if rho.is_numeric_repr() {
        let num = rho.to_numeric().expect("numeric repr converts");
        let mut out = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                let (sr, sc) = swap(r, c);
                out[(r, c)] = num[(sr, sc)];
            }
        }
        return Ok(SymMatrix::from_numeric(out));
    }
    Ok(SymMatrix::from_fn(dim, dim, |r, c| {
        let (sr, sc) = swap(r, c);
        rho.entry(sr, sc)
    }))
}

/// The index permutation linking superoperator and Choi forms. With the
/// composite row index (i1, i2) and column index (j1, j2) of the input,
/// `out[(i1, j1), (i2, j2)] = in[(i1, i2), (j1, j2)]`; the input must be
/// (d1*d2) x (d1*d2) and the output is d1^2 x d2^2.
pub fn reshuffle(m: &SymMatrix, d1: usize, d2: usize) -> Result<SymMatrix> {
    let n = d1 * d2;
    if m.shape() != (n, n) {
        return Err(Error::shape(format!(
            "reshuffle: matrix {:?} does not factor as ({d1}*{d2}) square",
            m.shape()
        )));
    }
    Ok(reshuffle_general(m, (d1, d2), (d1, d2)))
}

/// Generalized reshuffle for rectangular channel conversions: input rows
/// factor as (a, b), input columns as (c, d); output rows are (a, c) and
/// output columns (b, d).
pub(crate) fn reshuffle_general(
    m: &SymMatrix,
    row_factors: (usize, usize),
    col_factors: (usize, usize),
) -> SymMatrix {
    let (a, b) = row_factors;
    let (c, d) = col_factors;
    debug_assert_eq!(m.rows(), a * b);
    debug_assert_eq!(m.cols(), c * d);
    let out_rows = a * c;
    let out_cols = b * d;
    let source = |r: usize, col: usize| {
        let (i1, j1) = (r / c, r % c);
        let (i2, j2) = (col / d, col % d);
        (i1 * b + i2, j1 * d + j2)
    };
    if m.is_numeric_repr() {
        let num = m.to_numeric().expect("numeric repr converts");
        let mut out = CMatrix::zeros(out_rows, out_cols);
        for r in 0..out_rows {
            for col in 0..out_cols {
                let (sr, sc) = source(r, col);
                out[(r, col)] = num[(sr, sc)];
            }
        }
        return SymMatrix::from_numeric(out);
    }
    SymMatrix::from_fn(out_rows, out_cols, |r, col| {
        let (sr, sc) = source(r, col);
        m.entry(sr, sc)
    })
}

/// Uhlmann fidelity F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; for pure
/// rho this reduces to <psi|sigma|psi>. Numeric states only.
pub fn fidelity(rho: &QState, sigma: &QState) -> Result<f64> {
    if rho.total_dim() != sigma.total_dim() {
        return Err(Error::shape(format!(
            "fidelity of dim {} with dim {}",
            rho.total_dim(),
            sigma.total_dim()
        )));
    }
    if !rho.is_fully_numeric() || !sigma.is_fully_numeric() {
        return Err(Error::NotNumeric("fidelity needs fully bound states".into()));
    }
    match (&rho.body, &sigma.body) {
        (StateBody::Pure(a), StateBody::Pure(b)) => {
            let (va, vb) = (a.to_numeric()?, b.to_numeric()?);
            Ok(va.dotc(&vb).norm_sqr())
        }
        (StateBody::Pure(a), _) => {
            let v = a.to_numeric()?;
            let s = sigma.density().to_numeric()?;
            Ok((v.adjoint() * s * v)[(0, 0)].re.max(0.0))
        }
        (_, StateBody::Pure(_)) => fidelity(sigma, rho),
        _ => {
            let r = rho.density().to_numeric()?;
            let s = sigma.density().to_numeric()?;
            fidelity_matrices(&r, &s)
        }
    }
}

pub(crate) fn fidelity_matrices(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let root = numeric::hermitian_sqrt(rho, -1e-7)?;
    let inner = &root * sigma * &root;
    let inner_root = numeric::hermitian_sqrt(&inner, -1e-7)?;
    let tr: Complex64 = inner_root.diagonal().iter().sum();
    Ok((tr.re * tr.re).max(0.0))
}

/// Fidelity of the spectral truncation of `rho` (its `m` largest-eigenvalue
/// components, unnormalized) with `sigma`. `truncated_fidelity(rho, sigma,
/// dim)` equals `fidelity(rho, sigma)`.
///
/// Exactly `m` components are kept; ties at the m-th eigenvalue break by
/// eigenvector order from the decomposition, so the value is
/// decomposition-dependent on degenerate spectra.
pub fn truncated_fidelity(rho: &QState, sigma: &QState, m: usize) -> Result<f64> {
    let dim = rho.total_dim();
    if m < 1 || m > dim {
        return Err(Error::domain(format!(
            "truncation rank {m} outside 1..={dim}"
        )));
    }
    if rho.total_dim() != sigma.total_dim() {
        return Err(Error::shape("truncated_fidelity dimension mismatch"));
    }
    if !rho.is_fully_numeric() || !sigma.is_fully_numeric() {
        return Err(Error::NotNumeric(
            "truncated_fidelity needs fully bound states".into(),
        ));
    }
    let r = rho.density().to_numeric()?;
    let (eigs, vecs) = numeric::hermitian_eigen(&r);
    let dim = eigs.len();
    let mut truncated = CMatrix::zeros(dim, dim);
    // eigenvalues come back ascending; keep the top m
    for k in (dim - m)..dim {
        let v = vecs.column(k);
        let lambda = Complex64::new(eigs[k].max(0.0), 0.0);
        truncated += (v * v.adjoint()).map(|x| x * lambda);
    }
    let s = sigma.density().to_numeric()?;
    fidelity_matrices(&truncated, &s)
}
