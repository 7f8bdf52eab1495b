//! Thin LAPACK wrappers over nalgebra storage for the dense eigenproblems
//! that nalgebra's pure-Rust solvers are too slow for at our sizes.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::Complex;

/// Eigendecomposition of a real symmetric matrix: returns eigenvalues in
/// ascending order and the orthonormal eigenvectors as matrix columns.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidInput("symmetric_eigen requires a square matrix".into()));
    }
    if n == 0 {
        return Ok((DVector::zeros(0), DMatrix::zeros(0, 0)));
    }
    let mut v = a.clone();
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;
    let nn = n as i32;
    // Workspace query.
    let mut work = vec![0.0f64; 1];
    unsafe {
        lapack::dsyev(b'V', b'L', nn, v.as_mut_slice(), nn, &mut w, &mut work, -1, &mut info);
    }
    let lwork = work[0] as i32;
    let mut work = vec![0.0f64; lwork.max(1) as usize];
    unsafe {
        lapack::dsyev(b'V', b'L', nn, v.as_mut_slice(), nn, &mut w, &mut work, lwork, &mut info);
    }
    if info != 0 {
        return Err(Error::Singular(format!("dsyev failed with info = {info}")));
    }
    Ok((DVector::from_vec(w), v))
}

/// Eigendecomposition of a complex Hermitian matrix: eigenvalues ascending,
/// orthonormal eigenvectors as columns.
pub fn hermitian_eigen(a: &DMatrix<Complex>) -> Result<(DVector<f64>, DMatrix<Complex>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidInput("hermitian_eigen requires a square matrix".into()));
    }
    if n == 0 {
        return Ok((DVector::zeros(0), DMatrix::zeros(0, 0)));
    }
    let mut v = a.clone();
    let mut w = vec![0.0f64; n];
    let mut rwork = vec![0.0f64; (3 * n).max(1)];
    let mut info = 0i32;
    let nn = n as i32;
    let mut work = vec![Complex::new(0.0, 0.0); 1];
    unsafe {
        lapack::zheev(
            b'V', b'L', nn, v.as_mut_slice(), nn, &mut w, &mut work, -1, &mut rwork, &mut info,
        );
    }
    let lwork = work[0].re as i32;
    let mut work = vec![Complex::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        lapack::zheev(
            b'V', b'L', nn, v.as_mut_slice(), nn, &mut w, &mut work, lwork, &mut rwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Singular(format!("zheev failed with info = {info}")));
    }
    Ok((DVector::from_vec(w), v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_small() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (w, v) = symmetric_eigen(&a).unwrap();
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 3.0, epsilon = 1e-12);
        let recon = &v * DMatrix::from_diagonal(&w) * v.transpose();
        assert!((recon - a).norm() < 1e-12);
    }

    #[test]
    fn hermitian_small() {
        let i = Complex::new(0.0, 1.0);
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[Complex::new(1.0, 0.0), -i, i, Complex::new(1.0, 0.0)],
        );
        let (w, v) = hermitian_eigen(&a).unwrap();
        assert_abs_diff_eq!(w[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 2.0, epsilon = 1e-12);
        // Residual ‖Av − λv‖ for both pairs.
        for j in 0..2 {
            let col = v.column(j);
            let res = &a * col - col * Complex::new(w[j], 0.0);
            assert!(res.norm() < 1e-12);
        }
    }

    #[test]
    fn symmetric_moderate_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let n = 60;
        let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let a = &b + b.transpose();
        let (w, v) = symmetric_eigen(&a).unwrap();
        let recon = &v * DMatrix::from_diagonal(&w) * v.transpose();
        assert!((recon - &a).norm() < 1e-10 * a.norm());
    }
}
