use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(m)
        .first()
        .copied()
        .unwrap_or(f64::NAN)
}

/// Ratio of extreme singular values; infinite for singular input.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn spectral_map<T>(m: &DMatrix<T>, f: impl Fn(f64) -> f64) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64>,
{
    let eig = m.clone().symmetric_eigen();
    if let Some(bad) = eig.eigenvalues.iter().find(|&&l| l <= 0.0 || !l.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "matrix is not positive definite (eigenvalue {bad:e})"
        )));
    }
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| T::from_real(f(l))));
    Ok(v * d * v.adjoint())
}

/// Principal square root of a positive definite Hermitian (or real symmetric) matrix.
pub fn hermitian_sqrt<T>(m: &DMatrix<T>) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64>,
{
    spectral_map(m, f64::sqrt)
}

/// Inverse principal square root of a positive definite Hermitian matrix.
pub fn hermitian_sqrt_inv<T>(m: &DMatrix<T>) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64>,
{
    spectral_map(m, |l| 1.0 / l.sqrt())
}

/// Metric-orthonormal frame `G^{-1/2}` of a positive definite metric. When `G`
/// commutes with the complex structure, so does the frame.
pub fn orthonormal_frame(metric: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let e = hermitian_sqrt_inv(metric)?;
    Ok((&e + e.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn sqrt_squares_back() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let s = hermitian_sqrt(&a).unwrap();
        assert!((&s * &s - &a).amax() < 1e-12);
        let si = hermitian_sqrt_inv(&a).unwrap();
        assert!((&si * &a * &si - DMatrix::identity(3, 3)).amax() < 1e-12);
    }

    #[test]
    fn complex_sqrt_squares_back() {
        let b = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.3, 0.1),
                Complex64::new(-0.2, 0.2),
                Complex64::new(0.1, 0.0),
                Complex64::new(0.0, -0.4),
            ],
        );
        let m = DMatrix::identity(2, 2) - &b * b.adjoint();
        let s = hermitian_sqrt(&m).unwrap();
        assert!((&s * &s - &m).camax() < 1e-12);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(hermitian_sqrt(&a).is_err());
    }

    #[test]
    fn condition_of_identity_is_one() {
        assert!((condition_number(&DMatrix::<f64>::identity(4, 4)) - 1.0).abs() < 1e-14);
    }
}
