//! Thin wrappers over LAPACK through `ndarray-linalg`.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, EigVals, EigValsh, Eigh, Inverse, Solve, SVD, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn backend(e: impl std::fmt::Display) -> Error {
    Error::Backend(e.to_string())
}

fn check_finite(a: &Array2<Complex64>) -> Result<()> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(crate::error::invalid("matrix has non-finite entries"));
    }
    Ok(())
}

pub fn eigvals(a: &Array2<Complex64>) -> Result<Vec<Complex64>> {
    check_finite(a)?;
    Ok(a.eigvals().map_err(backend)?.to_vec())
}

/// Eigenvalues and right eigenvectors (as columns).
pub fn eig(a: &Array2<Complex64>) -> Result<(Vec<Complex64>, Array2<Complex64>)> {
    check_finite(a)?;
    let (vals, vecs) = a.eig().map_err(backend)?;
    Ok((vals.to_vec(), vecs))
}

/// Ascending eigenvalues and orthonormal eigenvectors of a real symmetric matrix.
pub fn eigh(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(crate::error::invalid("matrix has non-finite entries"));
    }
    a.eigh(UPLO::Lower).map_err(backend)
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn eigvalsh(a: &Array2<f64>) -> Result<Vec<f64>> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(crate::error::invalid("matrix has non-finite entries"));
    }
    Ok(a.eigvalsh(UPLO::Lower).map_err(backend)?.to_vec())
}

/// Singular values in descending order.
pub fn singular_values(a: &Array2<Complex64>) -> Result<Vec<f64>> {
    check_finite(a)?;
    let (_, s, _) = a.svd(false, false).map_err(backend)?;
    Ok(s.to_vec())
}

pub fn inverse(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    check_finite(a)?;
    a.inv().map_err(backend)
}

/// Solution of a x = b by LU with partial pivoting.
pub fn solve(a: &Array2<Complex64>, b: &Array1<Complex64>) -> Result<Array1<Complex64>> {
    check_finite(a)?;
    a.solve(b).map_err(backend)
}

/// Infinity norm.
pub fn norm_inf(a: &Array2<Complex64>) -> f64 {
    a.rows()
        .into_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let a = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(0.0, 0.0)]];
        let mut v = eigvals(&a).unwrap();
        v.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((v[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((v[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let a = array![[c(3.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -4.0)]];
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 4.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
    }
}
