use alloc::vec::Vec;

use crate::kernels::{kernel_sym, MassParams};
use crate::linalg::Matrix;
use crate::quad::RadialGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    T,
    W,
    Q,
    A,
    S0,
    Stm,
}

/// Dense Nystrom matrix of a sector operator in the symmetrized representation
/// (similarity by `sqrt(w_i p_i^2)`).
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMatrix {
    pub kind: MatrixKind,
    pub ell: usize,
    pub lambda: f64,
    pub mass: MassParams,
    pub grid: RadialGrid,
    pub entries: Matrix,
}

/// `K(p_i, p_j) sqrt(w_i p_i^2 w_j p_j^2)` for the sector kernel of the given power.
pub(crate) fn kernel_matrix(grid: &RadialGrid, ell: usize, mu: f64, lambda: f64, power: u32) -> Matrix {
    let n = grid.len();
    let l = grid.measure_roots();
    let p = &grid.nodes;
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = kernel_sym(ell, mu, lambda, p[i], p[j], power) * l[i] * l[j];
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

pub(crate) fn add_diagonal(m: &mut Matrix, d: &[f64]) {
    for (i, v) in d.iter().enumerate() {
        m[(i, i)] += v;
    }
}

pub(crate) fn diagonal_from<F: Fn(f64) -> f64>(grid: &RadialGrid, f: F) -> Vec<f64> {
    grid.nodes.iter().map(|&p| f(p)).collect()
}
