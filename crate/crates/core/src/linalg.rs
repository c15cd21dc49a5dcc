//! Dense Hermitian eigendecomposition.
//!
//! Matrices are stored as nalgebra `DMatrix<C64>` throughout the crate; the
//! eigensolver is faer's, which stays accurate on the highly degenerate
//! spectra that show up in ground-space and polar-factor computations.

use faer::complex_native::c64;
use faer::{Mat, Side};

use crate::pauli::{CMatrix, C64};

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// (as columns). Only the lower triangle of `m` is read.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let a = Mat::<c64>::from_fn(n, n, |i, j| {
        let z = m[(i, j)];
        c64::new(z.re, z.im)
    });
    let eig = a.selfadjoint_eigendecomposition(Side::Lower);
    let s = eig.s().column_vector();
    let u = eig.u();
    let mut order: Vec<usize> = (0..n).collect();
    let values: Vec<f64> = (0..n).map(|i| s.read(i).re).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let vectors = CMatrix::from_fn(n, n, |i, j| {
        let z = u.read(i, order[j]);
        C64::new(z.re, z.im)
    });
    (order.iter().map(|&i| values[i]).collect(), vectors)
}
