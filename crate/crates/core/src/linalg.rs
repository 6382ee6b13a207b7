//! Small dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Imaginary residue allowed on traces that are real by construction.
pub const IMAG_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// max |A - A^dagger| over all entries.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Trace of a matrix that is Hermitian by construction; fails on a
/// non-negligible imaginary residue instead of silently dropping it.
pub fn real_trace(m: &CMatrix, what: &'static str) -> Result<f64> {
    real_part(trace(m), what)
}

pub fn real_part(z: Complex64, what: &'static str) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::NumericalConsistency { what, imag: z.im });
    }
    Ok(z.re)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
/// Columns of the returned matrix are the orthonormal eigenvectors.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// negative round-off eigenvalues are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = eigh(m);
    let roots = DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| c(l.max(0.0).sqrt(), 0.0)),
    );
    &vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint()
}

/// Photon number operator a^dagger a in the truncated basis.
pub fn number_operator(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |r, col| {
        if r == col {
            c(r as f64, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
