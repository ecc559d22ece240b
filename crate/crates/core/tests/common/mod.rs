#![allow(dead_code)]

use corrconv_core::linalg::{ComplexMatrix, DensityMatrix};
use corrconv_core::C64;
use proptest::prelude::*;

pub fn complex_entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
}

pub fn matrix_from(n: usize, m: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    let data = entries.iter().map(|&(a, b)| C64::new(a, b)).collect();
    ComplexMatrix::from_vec(n, m, data).unwrap()
}

pub fn hermitian_from(n: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    matrix_from(n, n, entries).hermitian_part()
}

/// `G G† / Tr`, full rank with probability one.
pub fn density_from(dims: Vec<usize>, entries: &[(f64, f64)]) -> DensityMatrix {
    let n: usize = dims.iter().product();
    let g = matrix_from(n, n, entries);
    let m = &g * &g.adjoint();
    DensityMatrix::normalized(&m, dims).unwrap()
}

pub fn nalgebra_matrix(m: &ComplexMatrix) -> nalgebra::DMatrix<nalgebra::Complex<f64>> {
    nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m[(i, j)];
        nalgebra::Complex::new(z.re, z.im)
    })
}

/// Ascending eigenvalues from nalgebra.
pub fn nalgebra_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = nalgebra_matrix(m).symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

pub fn entropy_bits(values: &[f64]) -> f64 {
    values.iter().filter(|v| **v > 1e-15).map(|v| -v * v.log2()).sum()
}
