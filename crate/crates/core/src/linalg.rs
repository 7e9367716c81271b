//! Dense matrix aliases and the handful of norms used for validation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Largest absolute entry of `a - b`. Shapes must agree.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max |A^dag A - I|`.
pub fn unitarity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    max_abs_diff(&(a.adjoint() * a), &CMatrix::identity(n, n))
}

pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

/// `max |A^2 - A|`.
pub fn idempotency_defect(a: &CMatrix) -> f64 {
    max_abs_diff(&(a * a), a)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real diagonal matrix with the given entries.
pub fn diag(entries: &[f64]) -> RMatrix {
    RMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}
