//! Thin helpers over nalgebra for the dense symmetric problems used throughout.

use alloc::vec::Vec;
use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sorted_eigenvalues(m: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenpairs of a symmetric matrix, ascending; column `k` of the matrix is the `k`-th vector.
/// Each vector is signed so that its largest-magnitude component is positive.
pub fn sorted_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = m.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = Matrix::zeros(m.nrows(), n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let pivot = col.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let s = if pivot < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(col * s));
    }
    (values, vectors)
}

pub fn cholesky(m: &Matrix) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite)
}

/// `L^{-1} A L^{-T}` for `B = L L^T`, symmetrized.
pub fn reduce_generalized(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let chol = cholesky(b)?;
    let l = chol.l();
    let y = l
        .solve_lower_triangular(a)
        .ok_or(Error::Numerical("triangular solve failed"))?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(Error::Numerical("triangular solve failed"))?;
    Ok((&c + c.transpose()) * 0.5)
}

/// Eigenvalues of the pencil `A x = theta B x`, `B` positive definite, ascending.
pub fn generalized_eigenvalues(a: &Matrix, b: &Matrix) -> Result<Vec<f64>> {
    Ok(sorted_eigenvalues(&reduce_generalized(a, b)?))
}

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `||M - M^T||_F / ||M||_F`.
pub fn symmetry_defect(m: &Matrix) -> f64 {
    (m - m.transpose()).norm() / m.norm()
}

pub fn apply_complex(m: &Matrix, x: &[Complex64]) -> Vec<Complex64> {
    let n = m.nrows();
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); n];
    for (j, xj) in x.iter().enumerate() {
        for (i, o) in out.iter_mut().enumerate() {
            *o += xj * m[(i, j)];
        }
    }
    out
}

pub fn dot_complex(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_complex(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert_like(n: usize) -> Matrix {
        Matrix::from_fn(n, n, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + if i == j { 2.0 } else { 0.0 })
    }

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let m = hilbert_like(12);
        let (vals, vecs) = sorted_eigen(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vals.clone()));
        let back = &vecs * d * vecs.transpose();
        assert!((back - &m).norm() < 1e-12);
        let only = sorted_eigenvalues(&m);
        for (a, b) in only.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn generalized_matches_definition() {
        let a = Matrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 + ((j * 7 + i * 3) % 5) as f64);
        let b = hilbert_like(6);
        let th = generalized_eigenvalues(&a, &b).unwrap();
        for t in th {
            let det = (&a - &b * t).determinant();
            let scale = a.norm().powi(6);
            assert!(det.abs() < 1e-9 * scale, "{t} {det}");
        }
        let neg = -hilbert_like(4);
        assert_eq!(cholesky(&neg).unwrap_err(), Error::NotPositiveDefinite);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = Matrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![1.0, -5.0, 3.0]));
        assert!((spectral_norm(&m) - 5.0).abs() < 1e-14);
    }
}
