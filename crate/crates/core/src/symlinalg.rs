//! Dense vectors and matrices over symbolic expressions.
//!
//! [`SymMatrix`] and [`SymVector`] hold [`SymExpr`] entries in row-major
//! order. The semantic model is one type; all-numeric data is detected
//! internally and carried as packed complex doubles so the heavy numeric
//! paths (states, channels, sampling) avoid expression-tree overhead.
//! Symbolic construction never demotes to the numeric representation, so
//! exact entries like `sqrt(1/2)` keep their algebraic identities.
//!
//! Results of the algebra operations are not eagerly simplified; call
//! [`SymMatrix::simplify`] when a canonical form is needed.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{CMatrix, CVector};
use crate::symexpr::{Binding, SymExpr, Symbol};

#[derive(Clone, Debug)]
enum Repr {
    Sym(Vec<SymExpr>),
    Num(CMatrix),
}

/// Dense matrix of symbolic entries (row-major).
#[derive(Clone, Debug)]
pub struct SymMatrix {
    rows: usize,
    cols: usize,
    repr: Repr,
}

/// Matrix family produced by [`symbolic_matrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    /// Fresh complex symbols everywhere.
    General,
    /// Single column of fresh complex symbols.
    Vector,
    /// Real diagonal symbols, conjugate-mirrored off-diagonal.
    Hermitian,
    /// Affine entries with every row and column summing to one.
    Bistochastic,
}

impl SymMatrix {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<SymExpr>) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        SymMatrix { rows, cols, repr: Repr::Sym(entries) }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> SymExpr) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        SymMatrix::from_entries(rows, cols, entries)
    }

    pub fn from_numeric(m: CMatrix) -> Self {
        assert!(m.nrows() >= 1 && m.ncols() >= 1);
        SymMatrix { rows: m.nrows(), cols: m.ncols(), repr: Repr::Num(m) }
    }

    pub fn from_complex_rows(rows: usize, cols: usize, data: &[Complex64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        SymMatrix::from_numeric(CMatrix::from_row_slice(rows, cols, data))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SymMatrix::from_numeric(CMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix::from_numeric(CMatrix::identity(dim, dim))
    }

    /// Identity with exact integer entries (symbolic representation).
    pub fn identity_exact(dim: usize) -> Self {
        SymMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                SymExpr::one()
            } else {
                SymExpr::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry as an expression (builds a literal node for packed numeric
    /// storage).
    pub fn entry(&self, r: usize, c: usize) -> SymExpr {
        assert!(r < self.rows && c < self.cols, "entry index out of range");
        match &self.repr {
            Repr::Sym(v) => v[r * self.cols + c].clone(),
            Repr::Num(m) => SymExpr::from_complex(m[(r, c)]),
        }
    }

    /// True when held in packed numeric form.
    pub fn is_numeric_repr(&self) -> bool {
        matches!(self.repr, Repr::Num(_))
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        if let Repr::Sym(v) = &self.repr {
            for e in v {
                out.extend(e.free_symbols());
            }
        }
        out
    }

    pub fn is_numeric(&self) -> bool {
        match &self.repr {
            Repr::Num(_) => true,
            Repr::Sym(v) => v.iter().all(|e| e.is_numeric()),
        }
    }

    /// Packed numeric form; fails with `NotNumeric` if any entry has a free
    /// symbol.
    pub fn to_numeric(&self) -> Result<CMatrix> {
        match &self.repr {
            Repr::Num(m) => Ok(m.clone()),
            Repr::Sym(v) => {
                let b = Binding::new();
                let mut out = CMatrix::zeros(self.rows, self.cols);
                for r in 0..self.rows {
                    for c in 0..self.cols {
                        out[(r, c)] = v[r * self.cols + c].eval(&b).map_err(|e| match e {
                            Error::UnboundSymbol(name) => Error::NotNumeric(format!(
                                "matrix entry ({r},{c}) contains free symbol '{name}'"
                            )),
                            other => other,
                        })?;
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn substitute(&self, binding: &Binding) -> Result<SymMatrix> {
        match &self.repr {
            Repr::Num(_) => Ok(self.clone()),
            Repr::Sym(v) => {
                let mapped: Result<Vec<_>> = v.iter().map(|e| e.substitute(binding)).collect();
                Ok(SymMatrix { rows: self.rows, cols: self.cols, repr: Repr::Sym(mapped?) })
            }
        }
    }

    pub fn map(&self, f: impl Fn(&SymExpr) -> SymExpr) -> SymMatrix {
        let entries = match &self.repr {
            Repr::Sym(v) => v.iter().map(f).collect(),
            Repr::Num(m) => {
                let mut out = Vec::with_capacity(self.rows * self.cols);
                for r in 0..self.rows {
                    for c in 0..self.cols {
                        out.push(f(&SymExpr::from_complex(m[(r, c)])));
                    }
                }
                out
            }
        };
        SymMatrix { rows: self.rows, cols: self.cols, repr: Repr::Sym(entries) }
    }

    pub fn simplify(&self) -> SymMatrix {
        match &self.repr {
            Repr::Num(_) => self.clone(),
            Repr::Sym(_) => self.map(|e| e.simplify()),
        }
    }

    pub fn matmul(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "matmul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if let (Repr::Num(a), Repr::Num(b)) = (&self.repr, &other.repr) {
            return Ok(SymMatrix::from_numeric(a * b));
        }
        let out = SymMatrix::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = SymExpr::zero();
            for k in 0..self.cols {
                acc = acc + self.entry(r, k) * other.entry(k, c);
            }
            acc
        });
        Ok(out)
    }

    pub fn mul_vec(&self, v: &SymVector) -> Result<SymVector> {
        let m = self.matmul(&v.as_column())?;
        Ok(SymVector::from_column(&m))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> SymMatrix {
        match &self.repr {
            Repr::Num(m) => SymMatrix::from_numeric(m.adjoint()),
            Repr::Sym(_) => {
                SymMatrix::from_fn(self.cols, self.rows, |r, c| self.entry(c, r).conj())
            }
        }
    }

    pub fn transpose(&self) -> SymMatrix {
        match &self.repr {
            Repr::Num(m) => SymMatrix::from_numeric(m.transpose()),
            Repr::Sym(_) => SymMatrix::from_fn(self.cols, self.rows, |r, c| self.entry(c, r)),
        }
    }

    pub fn trace(&self) -> Result<SymExpr> {
        if !self.is_square() {
            return Err(Error::shape(format!("trace of {}x{}", self.rows, self.cols)));
        }
        match &self.repr {
            Repr::Num(m) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.rows {
                    acc += m[(k, k)];
                }
                Ok(SymExpr::from_complex(acc))
            }
            Repr::Sym(_) => {
                let mut acc = SymExpr::zero();
                for k in 0..self.rows {
                    acc = acc + self.entry(k, k);
                }
                Ok(acc)
            }
        }
    }

    pub fn scale(&self, factor: &SymExpr) -> SymMatrix {
        if let (Repr::Num(m), Ok(z)) = (&self.repr, factor.to_complex()) {
            return SymMatrix::from_numeric(m.map(|x| x * z));
        }
        self.map(|e| factor.clone() * e.clone())
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::shape(format!(
                "add: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        if let (Repr::Num(a), Repr::Num(b)) = (&self.repr, &other.repr) {
            return Ok(SymMatrix::from_numeric(a + b));
        }
        Ok(SymMatrix::from_fn(self.rows, self.cols, |r, c| {
            self.entry(r, c) + other.entry(r, c)
        }))
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.add(&other.scale(&SymExpr::int(-1)))
    }

    /// Kronecker product with row-major block layout.
    pub fn kronecker(&self, other: &SymMatrix) -> SymMatrix {
        if let (Repr::Num(a), Repr::Num(b)) = (&self.repr, &other.repr) {
            return SymMatrix::from_numeric(a.kronecker(b));
        }
        SymMatrix::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            let (r1, r2) = (r / other.rows, r % other.rows);
            let (c1, c2) = (c / other.cols, c % other.cols);
            self.entry(r1, c1) * other.entry(r2, c2)
        })
    }

    /// True when every entry simplifies to zero.
    pub fn is_zero_after_simplify(&self) -> bool {
        let s = self.simplify();
        (0..self.rows).all(|r| (0..self.cols).all(|c| s.entry(r, c).is_zero()))
    }
}

impl PartialEq for SymMatrix {
    fn eq(&self, other: &Self) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        if let (Repr::Num(a), Repr::Num(b)) = (&self.repr, &other.repr) {
            return a == b;
        }
        (0..self.rows)
            .all(|r| (0..self.cols).all(|c| self.entry(r, c) == other.entry(r, c)))
    }
}

impl std::fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(r, c))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug)]
enum VRepr {
    Sym(Vec<SymExpr>),
    Num(CVector),
}

/// Dense column vector of symbolic entries; interchangeable with a dim x 1
/// [`SymMatrix`].
#[derive(Clone, Debug)]
pub struct SymVector {
    repr: VRepr,
}

impl SymVector {
    pub fn from_entries(entries: Vec<SymExpr>) -> Self {
        assert!(!entries.is_empty());
        SymVector { repr: VRepr::Sym(entries) }
    }

    pub fn from_numeric(v: CVector) -> Self {
        assert!(!v.is_empty());
        SymVector { repr: VRepr::Num(v) }
    }

    pub fn from_complex_slice(data: &[Complex64]) -> Self {
        SymVector::from_numeric(CVector::from_column_slice(data))
    }

    pub fn from_column(m: &SymMatrix) -> Self {
        assert_eq!(m.cols(), 1, "from_column needs a column matrix");
        match &m.repr {
            Repr::Num(n) => SymVector::from_numeric(CVector::from_column_slice(n.as_slice())),
            Repr::Sym(v) => SymVector::from_entries(v.clone()),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            VRepr::Sym(v) => v.len(),
            VRepr::Num(v) => v.len(),
        }
    }

    pub fn entry(&self, k: usize) -> SymExpr {
        match &self.repr {
            VRepr::Sym(v) => v[k].clone(),
            VRepr::Num(v) => SymExpr::from_complex(v[k]),
        }
    }

    pub fn is_numeric_repr(&self) -> bool {
        matches!(self.repr, VRepr::Num(_))
    }

    pub fn is_numeric(&self) -> bool {
        match &self.repr {
            VRepr::Num(_) => true,
            VRepr::Sym(v) => v.iter().all(|e| e.is_numeric()),
        }
    }

    pub fn as_column(&self) -> SymMatrix {
        match &self.repr {
            VRepr::Num(v) => {
                SymMatrix::from_numeric(CMatrix::from_column_slice(v.len(), 1, v.as_slice()))
            }
            VRepr::Sym(v) => SymMatrix::from_entries(v.len(), 1, v.clone()),
        }
    }

    /// Conjugate-transposed row form (a bra).
    pub fn dagger(&self) -> SymMatrix {
        self.as_column().dagger()
    }

    pub fn to_numeric(&self) -> Result<CVector> {
        match &self.repr {
            VRepr::Num(v) => Ok(v.clone()),
            VRepr::Sym(_) => {
                let m = self.as_column().to_numeric()?;
                Ok(CVector::from_column_slice(m.as_slice()))
            }
        }
    }

    pub fn substitute(&self, binding: &Binding) -> Result<SymVector> {
        Ok(SymVector::from_column(&self.as_column().substitute(binding)?))
    }

    pub fn simplify(&self) -> SymVector {
        match &self.repr {
            VRepr::Num(_) => self.clone(),
            VRepr::Sym(v) => SymVector::from_entries(v.iter().map(|e| e.simplify()).collect()),
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        self.as_column().free_symbols()
    }

    /// Outer product |self><self| (conjugating the bra side).
    pub fn outer(&self) -> SymMatrix {
        let col = self.as_column();
        col.matmul(&col.dagger()).expect("outer product shapes always match")
    }

    /// <self|other>.
    pub fn inner(&self, other: &SymVector) -> Result<SymExpr> {
        if self.dim() != other.dim() {
            return Err(Error::shape(format!(
                "inner product of dim {} with dim {}",
                self.dim(),
                other.dim()
            )));
        }
        let m = self.dagger().matmul(&other.as_column())?;
        Ok(m.entry(0, 0))
    }
}

impl PartialEq for SymVector {
    fn eq(&self, other: &Self) -> bool {
        self.as_column() == other.as_column()
    }
}

impl std::fmt::Display for SymVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for k in 0..self.dim() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.entry(k))?;
        }
        write!(f, ")")
    }
}

/// Standard basis ket |index> in the given dimension.
pub fn ket(index: usize, dim: usize) -> Result<SymVector> {
    if index >= dim {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    Ok(SymVector::from_entries(
        (0..dim)
            .map(|k| if k == index { SymExpr::one() } else { SymExpr::zero() })
            .collect(),
    ))
}

/// Conjugate-transposed basis state <index| as a 1 x dim matrix.
pub fn bra(index: usize, dim: usize) -> Result<SymMatrix> {
    Ok(ket(index, dim)?.dagger())
}

/// Rank-1 projector |index><index|.
pub fn proj(index: usize, dim: usize) -> Result<SymMatrix> {
    let k = ket(index, dim)?;
    k.as_column().matmul(&bra(index, dim)?)
}

fn entry_symbol_name(base: &str, r: usize, c: usize, rows: usize, cols: usize) -> String {
    if rows > 10 || cols > 10 {
        format!("{base}_{r}_{c}")
    } else {
        format!("{base}{r}{c}")
    }
}

/// Fresh symbolic matrix of the requested family.
pub fn symbolic_matrix(base: &str, rows: usize, cols: usize, kind: MatrixKind) -> Result<SymMatrix> {
    match kind {
        MatrixKind::General => Ok(SymMatrix::from_fn(rows, cols, |r, c| {
            SymExpr::complex_symbol(&entry_symbol_name(base, r, c, rows, cols))
        })),
        MatrixKind::Vector => {
            if cols != 1 {
                return Err(Error::shape("vector kind requires a single column"));
            }
            Ok(SymMatrix::from_fn(rows, 1, |r, _| {
                SymExpr::complex_symbol(&if rows > 10 {
                    format!("{base}_{r}")
                } else {
                    format!("{base}{r}")
                })
            }))
        }
        MatrixKind::Hermitian => {
            if rows != cols {
                return Err(Error::shape(format!(
                    "hermitian matrix must be square, got {rows}x{cols}"
                )));
            }
            Ok(SymMatrix::from_fn(rows, cols, |r, c| {
                use std::cmp::Ordering::*;
                match r.cmp(&c) {
                    Equal => SymExpr::symbol(&entry_symbol_name(base, r, r, rows, cols)),
                    Less => SymExpr::complex_symbol(&entry_symbol_name(base, r, c, rows, cols)),
                    Greater => {
                        SymExpr::complex_symbol(&entry_symbol_name(base, c, r, rows, cols)).conj()
                    }
                }
            }))
        }
        MatrixKind::Bistochastic => {
            if rows != cols {
                return Err(Error::shape(format!(
                    "bistochastic matrix must be square, got {rows}x{cols}"
                )));
            }
            let n = rows;
            let free = |r: usize, c: usize| {
                SymExpr::symbol(&entry_symbol_name(base, r, c, rows, cols))
            };
            Ok(SymMatrix::from_fn(n, n, |r, c| {
                if r < n - 1 && c < n - 1 {
                    free(r, c)
                } else if r < n - 1 {
                    // last column: 1 - row partial sum
                    let mut s = SymExpr::one();
                    for cc in 0..n - 1 {
                        s = s - free(r, cc);
                    }
                    s
                } else if c < n - 1 {
                    // last row: 1 - column partial sum
                    let mut s = SymExpr::one();
                    for rr in 0..n - 1 {
                        s = s - free(rr, c);
                    }
                    s
                } else {
                    // corner, forced by counting: 1 - sum of last-column
                    // entries above it
                    let mut s = SymExpr::one();
                    for rr in 0..n - 1 {
                        let mut row_tail = SymExpr::one();
                        for cc in 0..n - 1 {
                            row_tail = row_tail - free(rr, cc);
                        }
                        s = s - row_tail;
                    }
                    s
                }
            }))
        }
    }
}

/// SU(2) element
/// [[e^{i a} cos t, e^{i b} sin t], [-e^{-i b} sin t, e^{-i a} cos t]];
/// the determinant is identically one.
pub fn special_unitary(theta: &SymExpr, alpha: &SymExpr, beta: &SymExpr) -> Result<SymMatrix> {
    for (name, p) in [("theta", theta), ("alpha", alpha), ("beta", beta)] {
        if !p.is_real_valued() {
            return Err(Error::domain(format!(
                "special_unitary parameter {name} must be a real-domain expression"
            )));
        }
    }
    let i = SymExpr::imaginary();
    let phase = |arg: SymExpr| arg.exp();
    let (ct, st) = (theta.cos(), theta.sin());
    Ok(SymMatrix::from_entries(
        2,
        2,
        vec![
            phase(i.clone() * alpha.clone()) * ct.clone(),
            phase(i.clone() * beta.clone()) * st.clone(),
            -(phase(-(i.clone() * beta.clone())) * st),
            phase(-(i * alpha.clone())) * ct,
        ],
    ))
}

/// Kronecker product of two or more factors.
pub fn kronecker_all(factors: &[SymMatrix]) -> Result<SymMatrix> {
    if factors.len() < 2 {
        return Err(Error::domain(
            "kronecker product needs at least two factors",
        ));
    }
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = acc.kronecker(f);
    }
    Ok(acc)
}

/// Hadamard with exact sqrt(1/2) entries.
pub fn hadamard_exact() -> SymMatrix {
    let h = SymExpr::rational(1, 2).sqrt();
    SymMatrix::from_entries(2, 2, vec![h.clone(), h.clone(), h.clone(), -h])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ket_bra_proj_definitions() {
        let k = ket(0, 2).unwrap();
        assert_eq!(k.entry(0), SymExpr::one());
        assert_eq!(k.entry(1), SymExpr::zero());
        let p = proj(1, 2).unwrap();
        assert_eq!(p.entry(0, 0), SymExpr::zero());
        assert_eq!(p.entry(1, 1), SymExpr::one());
        assert!(matches!(ket(4, 4), Err(Error::IndexOutOfRange { index: 4, dim: 4 })));
    }

    #[test]
    fn proj_equals_ket_times_bra_structurally() {
        for d in 2..=6 {
            for k in 0..d {
                let lhs = proj(k, d).unwrap().simplify();
                let rhs = ket(k, d)
                    .unwrap()
                    .as_column()
                    .matmul(&bra(k, d).unwrap())
                    .unwrap()
                    .simplify();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn hermitian_family_shape() {
        let m = symbolic_matrix("a", 2, 2, MatrixKind::Hermitian).unwrap();
        assert_eq!(m.entry(0, 0), SymExpr::symbol("a00"));
        assert_eq!(m.entry(1, 1), SymExpr::symbol("a11"));
        assert_eq!(m.entry(1, 0).simplify(), m.entry(0, 1).conj().simplify());
        // A - A† simplifies to the zero matrix
        assert!(m.sub(&m.dagger()).unwrap().is_zero_after_simplify());
        assert!(matches!(
            symbolic_matrix("a", 2, 3, MatrixKind::Hermitian),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn bistochastic_two_by_two_shape() {
        let m = symbolic_matrix("b", 2, 2, MatrixKind::Bistochastic).unwrap().simplify();
        let b00 = SymExpr::symbol("b00");
        let complement = (SymExpr::one() - b00.clone()).simplify();
        assert_eq!(m.entry(0, 0), b00.clone());
        assert_eq!(m.entry(0, 1), complement);
        assert_eq!(m.entry(1, 0), complement);
        assert_eq!(m.entry(1, 1), b00);
    }

    #[test]
    fn bistochastic_rows_and_columns_sum_to_one() {
        for n in 2..=4 {
            let m = symbolic_matrix("b", n, n, MatrixKind::Bistochastic).unwrap();
            for r in 0..n {
                let mut s = SymExpr::zero();
                for c in 0..n {
                    s = s + m.entry(r, c);
                }
                assert_eq!(s.simplify(), SymExpr::one(), "row {r} of n={n}");
            }
            for c in 0..n {
                let mut s = SymExpr::zero();
                for r in 0..n {
                    s = s + m.entry(r, c);
                }
                assert_eq!(s.simplify(), SymExpr::one(), "column {c} of n={n}");
            }
        }
    }

    #[test]
    fn special_unitary_identity_at_zero() {
        let zero = SymExpr::zero();
        let u = special_unitary(&zero, &zero, &zero).unwrap().simplify();
        assert_eq!(u, SymMatrix::identity_exact(2).simplify());
    }

    #[test]
    fn special_unitary_symbolic_det_and_unitarity() {
        let u = special_unitary(
            &SymExpr::symbol("t"),
            &SymExpr::symbol("al"),
            &SymExpr::symbol("be"),
        )
        .unwrap();
        let det =
            (u.entry(0, 0) * u.entry(1, 1) - u.entry(0, 1) * u.entry(1, 0)).simplify();
        assert_eq!(det, SymExpr::one());
        let gram = u.dagger().matmul(&u).unwrap().simplify();
        assert_eq!(gram, SymMatrix::identity_exact(2).simplify());
        let gram_other_side = u.matmul(&u.dagger()).unwrap().simplify();
        assert_eq!(gram_other_side, SymMatrix::identity_exact(2).simplify());
        assert!(matches!(
            special_unitary(&SymExpr::complex_symbol("z"), &SymExpr::zero(), &SymExpr::zero()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn kronecker_identities() {
        let i2 = SymMatrix::identity_exact(2);
        let i4 = i2.kronecker(&i2).simplify();
        assert_eq!(i4, SymMatrix::identity_exact(4).simplify());
        let k0 = ket(0, 2).unwrap().as_column();
        let k1 = ket(1, 2).unwrap().as_column();
        let k01 = k0.kronecker(&k1).simplify();
        assert_eq!(k01, ket(1, 4).unwrap().as_column().simplify());
        assert!(kronecker_all(&[i2]).is_err());
    }

    #[test]
    fn trace_and_dagger_basics() {
        assert_eq!(proj(0, 2).unwrap().trace().unwrap().simplify(), SymExpr::one());
        let m = symbolic_matrix("g", 2, 3, MatrixKind::General).unwrap();
        assert_eq!(m.dagger().dagger().simplify(), m.simplify());
        assert!(m.trace().is_err());
    }

    #[test]
    fn hadamard_squares_to_identity_exactly() {
        let h = hadamard_exact();
        let hh = h.matmul(&h).unwrap().simplify();
        assert_eq!(hh, SymMatrix::identity_exact(2).simplify());
    }

    #[test]
    fn matmul_shape_error() {
        let a = SymMatrix::zeros(2, 3);
        let b = SymMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::Shape(_))));
    }
}
