//! Small dense helpers shared by the spectral modules.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::cmp::Ordering;

pub type CMatrix = DMatrix<Complex64>;

/// Largest entry of `|A - A^H|`.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for k in 0..a.ncols() {
            let d = (a[(j, k)] - a[(k, j)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(a.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Ordering by decreasing modulus, ties broken by decreasing signed value.
/// The caller breaks remaining ties by index (the sort is stable).
pub fn modulus_order(a: f64, b: f64) -> Ordering {
    b.abs()
        .total_cmp(&a.abs())
        .then_with(|| b.total_cmp(&a))
}

pub fn sort_by_modulus(values: &mut [f64]) {
    values.sort_by(|a, b| modulus_order(*a, *b));
}
