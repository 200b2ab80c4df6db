//! Quantum channels: Kraus, superoperator, and Choi representations,
//! conversions between them, application to states, products over register
//! structure, and the standard single-qubit noise models.
//!
//! The vectorization convention is row-major throughout (vec stacks rows,
//! `vec(A rho B) = (A ⊗ B^T) vec(rho)`), so a Kraus list maps to the
//! superoperator `M = Σ K_i ⊗ conj(K_i)` and the Choi matrix is the
//! reshuffle of `M` (equivalently `Σ vec(K_i) vec(K_i)†`), living on the
//! output⊗input space with the output factor first. Converted forms are
//! memoized; conversions are referentially transparent and safe under
//! concurrent access.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{self, CMatrix};
use crate::qstate::{self, QState, RegisterShape};
use crate::symexpr::{Binding, SymExpr};
use crate::symlinalg::{SymMatrix, SymVector};

/// Hermiticity tolerance separating "numerically noisy CP" from "genuinely
/// non-CP" Choi matrices.
pub const CHOI_HERMITICITY_TOL: f64 = 1e-9;
/// Floor below which a Choi eigenvalue certifies a non-CP map.
pub const CP_EIGENVALUE_FLOOR: f64 = -1e-9;
/// Choi eigenvalues below this cutoff are discarded during Kraus
/// extraction; the number of kept terms is the numerical Choi rank.
pub const KRAUS_RANK_CUTOFF: f64 = 1e-12;
/// Tolerance for trace-preservation checks.
pub const TP_TOL: f64 = 1e-9;

/// Stored representation of a channel.
#[derive(Clone, Debug)]
pub enum ChannelForm {
    Kraus(Vec<SymMatrix>),
    Super(SymMatrix),
    Choi(SymMatrix),
}

/// A completely positive map between density operators.
#[derive(Debug)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    form: ChannelForm,
    trace_preserving: bool,
    kraus_cache: OnceLock<Vec<SymMatrix>>,
    super_cache: OnceLock<SymMatrix>,
    choi_cache: OnceLock<SymMatrix>,
}

impl Clone for Channel {
    fn clone(&self) -> Self {
        Channel {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            form: self.form.clone(),
            trace_preserving: self.trace_preserving,
            kraus_cache: self.kraus_cache.clone(),
            super_cache: self.super_cache.clone(),
            choi_cache: self.choi_cache.clone(),
        }
    }
}

impl Channel {
    fn new(dim_in: usize, dim_out: usize, form: ChannelForm, trace_preserving: bool) -> Self {
        Channel {
            dim_in,
            dim_out,
            form,
            trace_preserving,
            kraus_cache: OnceLock::new(),
            super_cache: OnceLock::new(),
            choi_cache: OnceLock::new(),
        }
    }

    /// Channel from a Kraus list. Numeric trace-preserving channels are
    /// validated (Σ K†K = I within [`TP_TOL`]); pass
    /// `trace_preserving = false` for sub-normalized maps.
    pub fn from_kraus(kraus: Vec<SymMatrix>, trace_preserving: bool) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::shape("Kraus list is empty"));
        };
        let (dim_out, dim_in) = first.shape();
        for k in &kraus {
            if k.shape() != (dim_out, dim_in) {
                return Err(Error::shape(format!(
                    "inconsistent Kraus shapes: {:?} vs {:?}",
                    k.shape(),
                    (dim_out, dim_in)
                )));
            }
        }
        let ch = Channel::new(dim_in, dim_out, ChannelForm::Kraus(kraus), trace_preserving);
        if trace_preserving && ch.is_numeric() {
            let dev = ch.completeness_deviation()?;
            if dev > TP_TOL {
                return Err(Error::domain(format!(
                    "Kraus completeness deviation {dev:.3e} exceeds {TP_TOL}"
                )));
            }
        }
        Ok(ch)
    }

    pub fn from_superoperator(m: SymMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        if m.shape() != (dim_out * dim_out, dim_in * dim_in) {
            return Err(Error::shape(format!(
                "superoperator shape {:?} does not match dims (in {dim_in}, out {dim_out})",
                m.shape()
            )));
        }
        Ok(Channel::new(dim_in, dim_out, ChannelForm::Super(m), true))
    }

    pub fn from_choi(
        m: SymMatrix,
        dim_in: usize,
        dim_out: usize,
        trace_preserving: bool,
    ) -> Result<Self> {
        let d = dim_in * dim_out;
        if m.shape() != (d, d) {
            return Err(Error::shape(format!(
                "Choi shape {:?} does not match dims (in {dim_in}, out {dim_out})",
                m.shape()
            )));
        }
        Ok(Channel::new(dim_in, dim_out, ChannelForm::Choi(m), trace_preserving))
    }

    /// The identity channel on the given dimension.
    pub fn identity(dim: usize) -> Self {
        Channel::new(
            dim,
            dim,
            ChannelForm::Kraus(vec![SymMatrix::identity_exact(dim)]),
            true,
        )
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn form(&self) -> &ChannelForm {
        &self.form
    }

    pub fn trace_preserving_flag(&self) -> bool {
        self.trace_preserving
    }

    pub fn is_numeric(&self) -> bool {
        match &self.form {
            ChannelForm::Kraus(ks) => ks.iter().all(|k| k.is_numeric()),
            ChannelForm::Super(m) | ChannelForm::Choi(m) => m.is_numeric(),
        }
    }

    /// Max deviation of Σ K†K from the identity (numeric channels).
    pub fn completeness_deviation(&self) -> Result<f64> {
        let ks = self.kraus()?;
        let mut acc = CMatrix::zeros(self.dim_in, self.dim_in);
        for k in &ks {
            let nk = k.to_numeric()?;
            acc += nk.adjoint() * nk;
        }
        Ok(numeric::max_abs_diff(&acc, &numeric::identity(self.dim_in)))
    }

    /// Superoperator matrix `M = Σ K_i ⊗ conj(K_i)` (memoized).
    pub fn superoperator(&self) -> Result<SymMatrix> {
        if let Some(m) = self.super_cache.get() {
            return Ok(m.clone());
        }
        let computed = match &self.form {
            ChannelForm::Super(m) => m.clone(),
            ChannelForm::Kraus(ks) => {
                let mut acc: Option<SymMatrix> = None;
                for k in ks {
                    let conj_k = k.map(|e| e.conj());
                    let term = k.kronecker(&conj_k);
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a.add(&term)?,
                    });
                }
                acc.expect("nonempty Kraus list")
            }
            ChannelForm::Choi(c) => {
                qstate::reshuffle_general(c, (self.dim_out, self.dim_in), (self.dim_out, self.dim_in))
            }
        };
        let _ = self.super_cache.set(computed.clone());
        Ok(computed)
    }

    /// Choi matrix on output⊗input, `C = Σ vec(K_i) vec(K_i)†` (memoized).
    pub fn choi(&self) -> Result<SymMatrix> {
        if let Some(m) = self.choi_cache.get() {
            return Ok(m.clone());
        }
        let computed = match &self.form {
            ChannelForm::Choi(c) => c.clone(),
            ChannelForm::Kraus(ks) => {
                let mut acc: Option<SymMatrix> = None;
                for k in ks {
                    let flat = vec_matrix(k);
                    let col = flat.as_column();
                    let term = col.matmul(&col.dagger())?;
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a.add(&term)?,
                    });
                }
                acc.expect("nonempty Kraus list")
            }
            ChannelForm::Super(m) => {
                qstate::reshuffle_general(m, (self.dim_out, self.dim_out), (self.dim_in, self.dim_in))
            }
        };
        let _ = self.choi_cache.set(computed.clone());
        Ok(computed)
    }

    /// Kraus list (memoized). Non-Kraus forms require numeric data: the
    /// Choi matrix is eigendecomposed, eigenvalues below
    /// [`KRAUS_RANK_CUTOFF`] are dropped, and `K_i = sqrt(λ_i) unvec(v_i)`.
    ///
    /// Fails with `NonHermitianChoi` when the reshuffled superoperator is
    /// not Hermitian and `NegativeEigenvalue` when the map is not CP.
    pub fn kraus(&self) -> Result<Vec<SymMatrix>> {
        if let ChannelForm::Kraus(ks) = &self.form {
            return Ok(ks.clone());
        }
        if let Some(ks) = self.kraus_cache.get() {
            return Ok(ks.clone());
        }
        let choi = self.choi()?;
        if !choi.is_numeric() {
            return Err(Error::NotNumeric(
                "Kraus extraction requires a numeric channel; symbolic channels travel in \
                 Kraus or superoperator form"
                    .into(),
            ));
        }
        let nc = choi.to_numeric()?;
        let herm_dev = numeric::hermiticity_deviation(&nc);
        if herm_dev > CHOI_HERMITICITY_TOL {
            return Err(Error::NonHermitianChoi(herm_dev));
        }
        let (eigs, vecs) = numeric::hermitian_eigen(&nc);
        if let Some(&min) = eigs.first() {
            if min < CP_EIGENVALUE_FLOOR {
                return Err(Error::NegativeEigenvalue(min));
            }
        }
        let mut kraus = Vec::new();
        for (k, &lambda) in eigs.iter().enumerate() {
            if lambda < KRAUS_RANK_CUTOFF {
                continue;
            }
            let v = vecs.column(k);
            let scale = Complex64::new(lambda.sqrt(), 0.0);
            let mut km = CMatrix::zeros(self.dim_out, self.dim_in);
            for row in 0..self.dim_out {
                for col in 0..self.dim_in {
                    km[(row, col)] = scale * v[row * self.dim_in + col];
                }
            }
            kraus.push(SymMatrix::from_numeric(km));
        }
        let _ = self.kraus_cache.set(kraus.clone());
        Ok(kraus)
    }

    /// Apply the channel to a state. Kraus and superoperator forms work
    /// symbolically; Choi-form channels convert through Kraus (numeric
    /// only).
    pub fn apply(&self, rho: &QState) -> Result<QState> {
        if rho.total_dim() != self.dim_in {
            return Err(Error::shape(format!(
                "channel input dim {} applied to state of dim {}",
                self.dim_in,
                rho.total_dim()
            )));
        }
        let density = rho.density();
        let out = match &self.form {
            ChannelForm::Kraus(ks) => apply_kraus(ks, &density)?,
            ChannelForm::Super(m) => {
                let vec_rho = vec_matrix(&density);
                let out_vec = m.mul_vec(&vec_rho)?;
                unvec_matrix(&out_vec, self.dim_out, self.dim_out)
            }
            ChannelForm::Choi(_) => apply_kraus(&self.kraus()?, &density)?,
        };
        let shape = if self.dim_out == rho.total_dim() {
            rho.shape().clone()
        } else {
            RegisterShape::new(vec![self.dim_out])?
        };
        Ok(QState::mixed_unchecked(shape, out))
    }

    /// Bind symbolic parameters in the stored form.
    pub fn substitute(&self, binding: &Binding) -> Result<Channel> {
        let form = match &self.form {
            ChannelForm::Kraus(ks) => {
                let mapped: Result<Vec<_>> = ks.iter().map(|k| k.substitute(binding)).collect();
                ChannelForm::Kraus(mapped?)
            }
            ChannelForm::Super(m) => ChannelForm::Super(m.substitute(binding)?),
            ChannelForm::Choi(m) => ChannelForm::Choi(m.substitute(binding)?),
        };
        Ok(Channel::new(self.dim_in, self.dim_out, form, self.trace_preserving))
    }
}

fn apply_kraus(kraus: &[SymMatrix], density: &SymMatrix) -> Result<SymMatrix> {
    let mut acc: Option<SymMatrix> = None;
    for k in kraus {
        let term = k.matmul(density)?.matmul(&k.dagger())?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    acc.ok_or_else(|| Error::shape("empty Kraus list"))
}

/// Row-major vectorization of a matrix as a symbolic vector.
fn vec_matrix(m: &SymMatrix) -> SymVector {
    if m.is_numeric_repr() {
        let n = m.to_numeric().expect("numeric repr converts");
        return SymVector::from_numeric(numeric::vec_row_major(&n));
    }
    let (rows, cols) = m.shape();
    SymVector::from_entries(
        (0..rows * cols).map(|k| m.entry(k / cols, k % cols)).collect(),
    )
}

fn unvec_matrix(v: &SymVector, rows: usize, cols: usize) -> SymMatrix {
    if v.is_numeric_repr() {
        let n = v.to_numeric().expect("numeric repr converts");
        return SymMatrix::from_numeric(numeric::unvec_row_major(&n, rows, cols));
    }
    SymMatrix::from_fn(rows, cols, |r, c| v.entry(r * cols + c))
}

/// Superoperator of a Kraus list (the `Superoperator` constructor).
pub fn superoperator(kraus: Vec<SymMatrix>) -> Result<Channel> {
    let ch = Channel::from_kraus(kraus, false)?;
    let m = ch.superoperator()?;
    Channel::from_superoperator(m, ch.dim_in, ch.dim_out)
}

/// Kraus extraction from a superoperator-form channel (the
/// `SuperoperatorToKraus` operation).
pub fn superoperator_to_kraus(ch: &Channel) -> Result<Channel> {
    let kraus = ch.kraus()?;
    Channel::from_kraus(kraus, false)
}

/// Tensor product channel acting as `c1 ⊗ c2` on a composite register,
/// satisfying `apply(product(c1, c2), rho ⊗ sigma) = apply(c1, rho) ⊗
/// apply(c2, sigma)`. Returned in superoperator form; the matrix is the
/// index-interleaved Kronecker construction consistent with row-major
/// vectorization (not the plain `M1 ⊗ M2`).
pub fn product_superoperator(c1: &Channel, c2: &Channel) -> Result<Channel> {
    let m1 = c1.superoperator()?;
    let m2 = c2.superoperator()?;
    let (din, dout) = (c1.dim_in * c2.dim_in, c1.dim_out * c2.dim_out);
    let (o1, i1, o2, i2) = (c1.dim_out, c1.dim_in, c2.dim_out, c2.dim_in);
    let split = |x: usize, inner: usize| (x / inner, x % inner);
    let build = |r: usize, c: usize| -> (usize, usize, usize, usize) {
        // rows of the product superoperator: (A, B), A = (a1 a2), B = (b1 b2)
        let (a, b) = split(r, dout);
        let (cc, e) = split(c, din);
        let (a1, a2) = split(a, o2);
        let (b1, b2) = split(b, o2);
        let (c1i, c2i) = split(cc, i2);
        let (e1, e2) = split(e, i2);
        let row1 = a1 * o1 + b1;
        let col1 = c1i * i1 + e1;
        let row2 = a2 * o2 + b2;
        let col2 = c2i * i2 + e2;
        (row1, col1, row2, col2)
    };
    let m = if m1.is_numeric_repr() && m2.is_numeric_repr() {
        let (n1, n2) = (m1.to_numeric()?, m2.to_numeric()?);
        let mut out = CMatrix::zeros(dout * dout, din * din);
        for r in 0..dout * dout {
            for c in 0..din * din {
                let (r1, col1, r2, col2) = build(r, c);
                out[(r, c)] = n1[(r1, col1)] * n2[(r2, col2)];
            }
        }
        SymMatrix::from_numeric(out)
    } else {
        SymMatrix::from_fn(dout * dout, din * din, |r, c| {
            let (r1, col1, r2, col2) = build(r, c);
            m1.entry(r1, col1) * m2.entry(r2, col2)
        })
    };
    Channel::from_superoperator(m, din, dout)
}

/// Left fold of [`product_superoperator`] over two or more factors.
pub fn product_superoperator_all(channels: &[Channel]) -> Result<Channel> {
    if channels.len() < 2 {
        return Err(Error::domain("channel product needs at least two factors"));
    }
    let mut acc = channels[0].clone();
    for c in &channels[1..] {
        acc = product_superoperator(&acc, c)?;
    }
    Ok(acc)
}

/// The standard single-qubit noise families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    Depolarizing,
    AmplitudeDamping,
    PhaseDamping,
    BitFlip,
    PhaseFlip,
}

impl NoiseKind {
    pub fn from_name(name: &str) -> Option<NoiseKind> {
        Some(match name.to_ascii_lowercase().as_str() {
            "depolarizing" => NoiseKind::Depolarizing,
            "amplitude_damping" | "amplitude-damping" => NoiseKind::AmplitudeDamping,
            "phase_damping" | "phase-damping" => NoiseKind::PhaseDamping,
            "bit_flip" | "bit-flip" => NoiseKind::BitFlip,
            "phase_flip" | "phase-flip" => NoiseKind::PhaseFlip,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::AmplitudeDamping => "amplitude_damping",
            NoiseKind::PhaseDamping => "phase_damping",
            NoiseKind::BitFlip => "bit_flip",
            NoiseKind::PhaseFlip => "phase_flip",
        }
    }
}

/// Textbook single-qubit noise channel in Kraus form. The parameter may be
/// a real symbol; numeric parameters must lie in [0, 1]. Symbolic
/// parameters produce Kraus sets whose completeness Σ K†K = I holds after
/// `simplify`.
pub fn noise_model(kind: NoiseKind, param: SymExpr) -> Result<Channel> {
    if let Ok(v) = param.to_complex() {
        if v.im != 0.0 || !(0.0..=1.0).contains(&v.re) {
            return Err(Error::domain(format!(
                "noise parameter {v} outside [0, 1]"
            )));
        }
    } else if !param.is_real_valued() {
        return Err(Error::domain(
            "noise parameter must be real-valued".to_string(),
        ));
    }
    let one = SymExpr::one;
    let zero = SymExpr::zero;
    let p = param;
    let kraus = match kind {
        NoiseKind::Depolarizing => {
            let w0 = (one() - p.clone() * SymExpr::rational(3, 4)).sqrt();
            let w = (p * SymExpr::rational(1, 4)).sqrt();
            let i = SymExpr::imaginary();
            vec![
                SymMatrix::from_entries(2, 2, vec![w0.clone(), zero(), zero(), w0]),
                SymMatrix::from_entries(2, 2, vec![zero(), w.clone(), w.clone(), zero()]),
                SymMatrix::from_entries(
                    2,
                    2,
                    vec![zero(), -(i.clone() * w.clone()), i * w.clone(), zero()],
                ),
                SymMatrix::from_entries(2, 2, vec![w.clone(), zero(), zero(), -w]),
            ]
        }
        NoiseKind::AmplitudeDamping => {
            let keep = (one() - p.clone()).sqrt();
            let decay = p.sqrt();
            vec![
                SymMatrix::from_entries(2, 2, vec![one(), zero(), zero(), keep]),
                SymMatrix::from_entries(2, 2, vec![zero(), decay, zero(), zero()]),
            ]
        }
        NoiseKind::PhaseDamping => {
            let keep = (one() - p.clone()).sqrt();
            let damp = p.sqrt();
            vec![
                SymMatrix::from_entries(2, 2, vec![one(), zero(), zero(), keep]),
                SymMatrix::from_entries(2, 2, vec![zero(), zero(), zero(), damp]),
            ]
        }
        NoiseKind::BitFlip => {
            let keep = (one() - p.clone()).sqrt();
            let flip = p.sqrt();
            vec![
                SymMatrix::from_entries(2, 2, vec![keep.clone(), zero(), zero(), keep]),
                SymMatrix::from_entries(2, 2, vec![zero(), flip.clone(), flip, zero()]),
            ]
        }
        NoiseKind::PhaseFlip => {
            let keep = (one() - p.clone()).sqrt();
            let flip = p.sqrt();
            vec![
                SymMatrix::from_entries(2, 2, vec![keep.clone(), zero(), zero(), keep]),
                SymMatrix::from_entries(2, 2, vec![flip.clone(), zero(), zero(), -flip]),
            ]
        }
    };
    Channel::from_kraus(kraus, true)
}

/// Numeric CPTP validation of a channel: Kraus completeness, Choi
/// hermiticity/positivity, and the trace-preservation condition on the
/// Choi matrix (partial trace over the output factor equals the identity).
pub fn validate_cptp(ch: &Channel) -> Result<()> {
    let dev = ch.completeness_deviation()?;
    if dev > TP_TOL {
        return Err(Error::domain(format!(
            "Kraus completeness deviation {dev:.3e}"
        )));
    }
    let choi = ch.choi()?.to_numeric()?;
    let herm = numeric::hermiticity_deviation(&choi);
    if herm > CHOI_HERMITICITY_TOL {
        return Err(Error::NonHermitianChoi(herm));
    }
    let (eigs, _) = numeric::hermitian_eigen(&choi);
    if let Some(&min) = eigs.first() {
        if min < CP_EIGENVALUE_FLOOR {
            return Err(Error::NegativeEigenvalue(min));
        }
    }
    // Tr_out(Choi) = I on the input factor
    let shape = RegisterShape::new(vec![ch.dim_out(), ch.dim_in()])?;
    let reduced = qstate::partial_trace_matrix(
        &SymMatrix::from_numeric(choi),
        &shape,
        &[1],
    )?
    .to_numeric()?;
    let dev = numeric::max_abs_diff(&reduced, &numeric::identity(ch.dim_in()));
    if dev > TP_TOL {
        return Err(Error::domain(format!(
            "Choi trace-preservation deviation {dev:.3e}"
        )));
    }
    Ok(())
}
