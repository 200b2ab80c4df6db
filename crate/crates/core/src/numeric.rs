//! Numeric linear-algebra helpers shared by the state, channel, and
//! randomness modules: complex dense types, Hermitian eigendecomposition,
//! operator square roots, and deviation measures.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Largest entrywise deviation from the Hermitian condition m = m†.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut max = 0.0f64;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            max = max.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    max
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    let mut max = 0.0f64;
    for (x, y) in a.iter().zip(b.iter()) {
        max = max.max((x - y).norm());
    }
    max
}

/// Deviation of u from unitarity, max |(u†u - I)_{rc}|.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let gram = u.adjoint() * u;
    max_abs_diff(&gram, &identity(u.ncols()))
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian
/// matrix. The input is symmetrized to wash out numeric asymmetry.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let dim = m.nrows();
    let mut vectors = CMatrix::zeros(dim, dim);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// Hermitian operator square root via eigendecomposition. Eigenvalues in
/// [floor, 0) clamp to zero; an eigenvalue below the floor is an error.
pub fn hermitian_sqrt(m: &CMatrix, floor: f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m);
    let mut diag = CVector::zeros(values.len());
    for (k, &v) in values.iter().enumerate() {
        if v < floor {
            return Err(Error::NegativeEigenvalue(v));
        }
        diag[k] = Complex64::new(v.max(0.0).sqrt(), 0.0);
    }
    Ok(&vectors * CMatrix::from_diagonal(&diag) * vectors.adjoint())
}

/// Hermitian m^(-1/2); eigenvalues below `min_eig` report a singular
/// marginal.
pub fn hermitian_inv_sqrt(m: &CMatrix, min_eig: f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m);
    let mut diag = CVector::zeros(values.len());
    for (k, &v) in values.iter().enumerate() {
        if v < min_eig {
            return Err(Error::SingularMarginal);
        }
        diag[k] = Complex64::new(1.0 / v.sqrt(), 0.0);
    }
    Ok(&vectors * CMatrix::from_diagonal(&diag) * vectors.adjoint())
}

/// Row-major vectorization: vec(m) stacks rows, so vec(AρB) = (A ⊗ Bᵀ)vec(ρ).
pub fn vec_row_major(m: &CMatrix) -> CVector {
    let (rows, cols) = m.shape();
    CVector::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
}

pub fn unvec_row_major(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    debug_assert_eq!(v.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |r, c| v[r * cols + c])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermitian_eigen_recovers_pauli_y_spectrum() {
        let y = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let (vals, vecs) = hermitian_eigen(&y);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        // reconstruct
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            2,
            vals.iter().map(|&v| c(v, 0.)),
        ));
        let rec = &vecs * d * vecs.adjoint();
        assert!(max_abs_diff(&rec, &y) < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        // random PSD: A A† on a fixed 3x3
        let a = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.3, 0.1), c(-0.2, 0.5), c(0.0, -0.4),
                c(1.1, 0.0), c(0.4, -0.3), c(0.2, 0.2),
                c(-0.5, 0.6), c(0.1, 0.1), c(0.9, -0.7),
            ],
        );
        let psd = &a * a.adjoint();
        let root = hermitian_sqrt(&psd, -1e-9).unwrap();
        assert!(max_abs_diff(&(&root * &root), &psd) < 1e-10);
    }

    #[test]
    fn vec_unvec_roundtrip_and_convention() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]);
        let v = vec_row_major(&m);
        // row-major: (1, 2, 3, 4)
        assert_eq!(v[1], c(2., 0.));
        assert_eq!(v[2], c(3., 0.));
        assert!(max_abs_diff(&unvec_row_major(&v, 2, 2), &m) < 1e-15);
        // vec(A rho B) = (A kron B^T) vec(rho)
        let a = CMatrix::from_row_slice(2, 2, &[c(0., 1.), c(1., 0.), c(0.5, 0.), c(0., -1.)]);
        let b = CMatrix::from_row_slice(2, 2, &[c(1., 1.), c(0., 0.), c(2., 0.), c(0.3, 0.)]);
        let lhs = vec_row_major(&(&a * &m * &b));
        let rhs = a.kronecker(&b.transpose()) * vec_row_major(&m);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
