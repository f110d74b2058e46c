//! Shared numerical substrate.
//!
//! Every tangent vector and bilinear form in this crate lives in the same real
//! chart: a complex vector `(z_1, ..., z_n)` is stored as the interleaved real
//! vector `(Re z_1, Im z_1, ..., Re z_n, Im z_n)`. Complex matrices are
//! flattened row-major before interleaving, so the first row of an `n x n`
//! matrix occupies the first `2n` real coordinates.

mod fd;
mod linalg;
mod sample;

pub use fd::{
    fd_covariant_hessian, fd_gradient, fd_hessian, fd_jacobian, DEFAULT_GRADIENT_STEP,
    DEFAULT_HESSIAN_STEP, DEFAULT_METRIC_STEP,
};
pub use linalg::{
    condition_number, hermitian_sqrt, hermitian_sqrt_inv, min_eigenvalue, orthonormal_frame,
    symmetric_eigenvalues,
};
pub use sample::{
    sample_ball, sample_omega1, sample_point, sample_point_seeded, sample_polydisc, sample_unitary,
    seeded_rng, stream_rng,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry invariant of [`RealForm`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Interleave a complex vector into real coordinates.
pub fn to_real(z: &[Complex64]) -> DVector<f64> {
    DVector::from_iterator(2 * z.len(), z.iter().flat_map(|c| [c.re, c.im]))
}

/// Inverse of [`to_real`].
pub fn from_real(x: &[f64]) -> Result<Vec<Complex64>> {
    if x.len() % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "real coordinate vector has odd length {}",
            x.len()
        )));
    }
    Ok(x.chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect())
}

/// Row-major interleaving of a complex matrix.
pub fn matrix_to_real(z: &DMatrix<Complex64>) -> DVector<f64> {
    let (rows, cols) = z.shape();
    let mut out = DVector::zeros(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let k = 2 * (i * cols + j);
            out[k] = z[(i, j)].re;
            out[k + 1] = z[(i, j)].im;
        }
    }
    out
}

/// Inverse of [`matrix_to_real`] for a square `m x m` matrix.
pub fn matrix_from_real(x: &[f64], m: usize) -> Result<DMatrix<Complex64>> {
    if x.len() != 2 * m * m {
        return Err(Error::Dimension {
            expected: 2 * m * m,
            got: x.len(),
        });
    }
    Ok(DMatrix::from_fn(m, m, |i, j| {
        let k = 2 * (i * m + j);
        Complex64::new(x[k], x[k + 1])
    }))
}

/// Symmetric real bilinear form on a `2n`-dimensional real tangent space.
#[derive(Debug, Clone, PartialEq)]
pub struct RealForm {
    matrix: DMatrix<f64>,
}

impl RealForm {
    /// Wrap a matrix, checking that it is square, even-sized and symmetric.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        check_even_square(&matrix)?;
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "bilinear form is not symmetric (asymmetry {asym:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wrap `(M + M^T) / 2`.
    pub fn symmetrized(matrix: DMatrix<f64>) -> Result<Self> {
        check_even_square(&matrix)?;
        let sym = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self { matrix: sym })
    }

    pub(crate) fn from_symmetric_unchecked(matrix: DMatrix<f64>) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Real dimension `2n`.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn complex_dim(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `B(u, v) = u^T M v`.
    pub fn eval(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.matrix * v))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.matrix)
    }

    /// Eigenvalues of the form relative to a positive definite metric, i.e. the
    /// values of `B(xi, xi)` on metric-unit eigenvectors. Ascending.
    pub fn relative_eigenvalues(&self, metric: &RealForm) -> Result<Vec<f64>> {
        let e = hermitian_sqrt_inv(metric.matrix())?;
        let normalized = &e * &self.matrix * &e;
        Ok(symmetric_eigenvalues(&normalized))
    }

    /// Express the form in a frame: `E^T M E`.
    pub fn in_frame(&self, frame: &DMatrix<f64>) -> RealForm {
        let m = frame.transpose() * &self.matrix * frame;
        RealForm::from_symmetric_unchecked((&m + m.transpose()) * 0.5)
    }
}

fn check_even_square(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "bilinear form must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "bilinear form must have even size, got {}",
            m.nrows()
        )));
    }
    Ok(())
}

/// Real tangent vector attached to a basepoint given in real coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    basepoint: DVector<f64>,
    entries: DVector<f64>,
}

impl TangentVector {
    pub fn new(basepoint: DVector<f64>, entries: DVector<f64>) -> Result<Self> {
        if basepoint.len() != entries.len() {
            return Err(Error::Dimension {
                expected: basepoint.len(),
                got: entries.len(),
            });
        }
        Ok(Self { basepoint, entries })
    }

    pub fn basepoint(&self) -> &DVector<f64> {
        &self.basepoint
    }

    pub fn entries(&self) -> &DVector<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DVector<f64> {
        self.entries
    }

    /// Length measured by the given metric at the basepoint.
    pub fn norm_in(&self, metric: &RealForm) -> f64 {
        metric.eval(&self.entries, &self.entries).max(0.0).sqrt()
    }
}

/// Complex structure `J` in the interleaved chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure {
    n: usize,
    matrix: DMatrix<f64>,
}

impl ComplexStructure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Multiplication by `i`: `(x, y) -> (-y, x)` on every complex slot.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(v.len());
        for k in 0..v.len() / 2 {
            out[2 * k] = -v[2 * k + 1];
            out[2 * k + 1] = v[2 * k];
        }
        out
    }

    /// The covector `alpha o J`, returned as a column vector (`J^T alpha`).
    pub fn pullback(&self, alpha: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(alpha.len());
        for k in 0..alpha.len() / 2 {
            out[2 * k] = alpha[2 * k + 1];
            out[2 * k + 1] = -alpha[2 * k];
        }
        out
    }
}

/// `J` for complex dimension `n`: `J e_{2k-1} = e_{2k}`, `J e_{2k} = -e_{2k-1}`.
pub fn j_operator(n: usize) -> Result<ComplexStructure> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "complex dimension must be at least 1".into(),
        ));
    }
    let mut matrix = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        matrix[(2 * k + 1, 2 * k)] = 1.0;
        matrix[(2 * k, 2 * k + 1)] = -1.0;
    }
    Ok(ComplexStructure { n, matrix })
}

/// Real `2n x 2n` matrix of the complex-linear map `v -> A v`.
pub fn complex_to_real_linear(a: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (rows, cols) = a.shape();
    let mut out = DMatrix::zeros(2 * rows, 2 * cols);
    for i in 0..rows {
        for j in 0..cols {
            let c = a[(i, j)];
            out[(2 * i, 2 * j)] = c.re;
            out[(2 * i, 2 * j + 1)] = -c.im;
            out[(2 * i + 1, 2 * j)] = c.im;
            out[(2 * i + 1, 2 * j + 1)] = c.re;
        }
    }
    out
}

/// Real form `Re(u^T h conj(v))` of a Hermitian matrix `h`.
pub fn hermitian_to_real_form(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let c = h[(j, k)];
            out[(2 * j, 2 * k)] = c.re;
            out[(2 * j, 2 * k + 1)] = c.im;
            out[(2 * j + 1, 2 * k)] = -c.im;
            out[(2 * j + 1, 2 * k + 1)] = c.re;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_for_n1_is_quarter_rotation() {
        let j = j_operator(1).unwrap();
        assert_eq!(j.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn j_squares_to_minus_identity_and_is_skew() {
        for n in 1..=4 {
            let j = j_operator(n).unwrap();
            let m = j.matrix();
            let id = DMatrix::<f64>::identity(2 * n, 2 * n);
            assert!((m * m + &id).amax() <= 1e-14);
            assert!((m.transpose() * m - &id).amax() <= 1e-14);
            assert_eq!(m.transpose(), -m.clone());
        }
    }

    #[test]
    fn j_rejects_zero_dimension() {
        assert!(j_operator(0).is_err());
    }

    #[test]
    fn j_apply_and_pullback_match_matrix() {
        let j = j_operator(3).unwrap();
        let v = DVector::from_vec(vec![0.3, -1.2, 2.0, 0.5, -0.7, 0.1]);
        assert!((j.apply(&v) - j.matrix() * &v).amax() < 1e-15);
        assert!((j.pullback(&v) - j.matrix().transpose() * &v).amax() < 1e-15);
    }

    #[test]
    fn real_form_rejects_asymmetric_and_odd() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(RealForm::new(m.clone()).is_err());
        assert!(RealForm::symmetrized(m).is_ok());
        assert!(RealForm::new(DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn complex_linear_map_commutes_with_j() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 2.0),
                Complex64::new(-0.5, 0.1),
                Complex64::new(0.0, -1.0),
                Complex64::new(3.0, 0.0),
            ],
        );
        let r = complex_to_real_linear(&a);
        let j = j_operator(2).unwrap();
        assert!((&r * j.matrix() - j.matrix() * &r).amax() < 1e-14);
        let z = vec![Complex64::new(0.2, 0.7), Complex64::new(-1.0, 0.4)];
        let az: Vec<Complex64> = (0..2).map(|i| a[(i, 0)] * z[0] + a[(i, 1)] * z[1]).collect();
        assert!((r * to_real(&z) - to_real(&az)).amax() < 1e-14);
    }

    #[test]
    fn matrix_chart_round_trips() {
        let m = DMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64, j as f64 - 0.5));
        let x = matrix_to_real(&m);
        assert_eq!(matrix_from_real(x.as_slice(), 3).unwrap(), m);
        assert_eq!(x[2], 0.0);
        assert_eq!(x[3], 0.5);
    }
}
