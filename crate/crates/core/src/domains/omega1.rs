//! The first classical domain `Omega_1[m, m] = {Z : I - Z Z^* > 0}` with the
//! Kähler potential `-log det(I - Z Z^*)`.
//!
//! General-pair quantities are computed the way the geometry dictates: move the
//! center to the origin with a domain automorphism, rotate the moving point onto
//! the diagonal polydisc with two unitaries, evaluate the diagonal formulas, and
//! transport back through the differential of that isometry.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{self, condition_number, hermitian_sqrt, hermitian_sqrt_inv, RealForm, TangentVector};

/// Matrices whose defect `I - Z Z^*` has smallest eigenvalue below this are rejected.
pub const DEFECT_MARGIN: f64 = 1e-10;
/// Largest accepted condition number of `I - W^* Z`.
pub const MAX_CONDITION: f64 = 1e12;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Point of `Omega_1[m, m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMatrixPoint {
    z: DMatrix<Complex64>,
}

impl DomainMatrixPoint {
    pub fn new(z: DMatrix<Complex64>) -> Result<Self> {
        if !z.is_square() || z.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "domain point must be a non-empty square matrix, got {}x{}",
                z.nrows(),
                z.ncols()
            )));
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::domain("I - ZZ* > 0", "non-finite entry"));
        }
        let top = z.clone().singular_values().max();
        let defect = 1.0 - top * top;
        if defect <= DEFECT_MARGIN {
            return Err(Error::domain(
                "I - ZZ* > 0",
                format!("smallest eigenvalue of I - ZZ* is {defect:e}"),
            ));
        }
        Ok(Self { z })
    }

    pub fn zero(m: usize) -> Self {
        Self {
            z: DMatrix::zeros(m, m),
        }
    }

    pub fn from_real(x: &[f64], m: usize) -> Result<Self> {
        Self::new(numerics::matrix_from_real(x, m)?)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.z
    }

    pub fn size(&self) -> usize {
        self.z.nrows()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.z.clone().singular_values().max()
    }

    pub fn to_real(&self) -> DVector<f64> {
        numerics::matrix_to_real(&self.z)
    }
}

fn same_size(a: &DomainMatrixPoint, b: &DomainMatrixPoint) -> Result<()> {
    if a.size() == b.size() {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: a.size(),
            got: b.size(),
        })
    }
}

/// `-log det(I - X X^*) = -sum log(1 - s_i^2)` over the singular values of `X`.
fn neg_log_det_defect(x: &DMatrix<Complex64>) -> f64 {
    x.clone()
        .singular_values()
        .iter()
        .map(|s| -(-s * s).ln_1p())
        .sum()
}

fn invert_guarded(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let real = numerics::complex_to_real_linear(m);
    let cond = condition_number(&real);
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::IllConditioned(cond));
    }
    m.clone()
        .try_inverse()
        .ok_or(Error::IllConditioned(f64::INFINITY))
}

/// Diastasis `D(Z, W)`, computed as `-log det(I - Y Y^*)` with `Y = Phi_W(Z)`.
pub fn omega1_diastasis(z: &DomainMatrixPoint, w: &DomainMatrixPoint) -> Result<f64> {
    same_size(z, w)?;
    let y = omega1_mobius(w).apply_matrix(z.matrix())?;
    Ok(neg_log_det_defect(&y))
}

/// Geodesic distance `sqrt(sum arctanh(s_i)^2)` over the singular values of `Phi_W(Z)`.
pub fn omega1_distance(z: &DomainMatrixPoint, w: &DomainMatrixPoint) -> Result<f64> {
    same_size(z, w)?;
    let y = omega1_mobius(w).apply_matrix(z.matrix())?;
    Ok(y.singular_values().iter().map(|s| s.atanh().powi(2)).sum::<f64>().sqrt())
}

/// The closed determinant form
/// `-log[det(I - ZZ^*) det(I - WW^*) / |det(I - W Z^*)|^2]`.
pub fn omega1_diastasis_closed_form(z: &DomainMatrixPoint, w: &DomainMatrixPoint) -> Result<f64> {
    same_size(z, w)?;
    let m = z.size();
    let cross = (DMatrix::identity(m, m) - w.matrix() * z.matrix().adjoint()).determinant();
    Ok(neg_log_det_defect(z.matrix()) + neg_log_det_defect(w.matrix()) + 2.0 * cross.norm().ln())
}

/// Holomorphic isometry `Z -> U1 Phi_W(Z) U2` with
/// `Phi_W(Z) = (I - WW^*)^{-1/2} (Z - W) (I - W^*Z)^{-1} (I - W^*W)^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Omega1Isometry {
    center: DMatrix<Complex64>,
    left_root: DMatrix<Complex64>,
    right_root: DMatrix<Complex64>,
    u1: DMatrix<Complex64>,
    u2: DMatrix<Complex64>,
}

/// The automorphism sending `W` to `0`, without post-rotation.
pub fn omega1_mobius(w: &DomainMatrixPoint) -> Omega1Isometry {
    let m = w.size();
    Omega1Isometry::build(w.matrix().clone(), DMatrix::identity(m, m), DMatrix::identity(m, m))
        .expect("roots exist for points of the domain")
}

fn check_unitary(u: &DMatrix<Complex64>, m: usize) -> Result<()> {
    if u.shape() != (m, m) {
        return Err(Error::Dimension {
            expected: m,
            got: u.nrows(),
        });
    }
    let defect = (u * u.adjoint() - DMatrix::identity(m, m)).camax();
    if defect > 1e-12 {
        return Err(Error::InvalidArgument(format!("matrix is not unitary (defect {defect:e})")));
    }
    Ok(())
}

impl Omega1Isometry {
    fn build(center: DMatrix<Complex64>, u1: DMatrix<Complex64>, u2: DMatrix<Complex64>) -> Result<Self> {
        let m = center.nrows();
        let id = DMatrix::<Complex64>::identity(m, m);
        let left_root = hermitian_sqrt_inv(&(&id - &center * center.adjoint()))?;
        let right_root = hermitian_sqrt(&(&id - center.adjoint() * &center))?;
        Ok(Self {
            center,
            left_root,
            right_root,
            u1,
            u2,
        })
    }

    /// `Z -> U1 Z U2`, an isometry fixing the origin.
    pub fn rotation(u1: DMatrix<Complex64>, u2: DMatrix<Complex64>) -> Result<Self> {
        let m = u1.nrows();
        check_unitary(&u1, m)?;
        check_unitary(&u2, m)?;
        Self::build(DMatrix::zeros(m, m), u1, u2)
    }

    /// `Z -> U1 Phi_W(Z) U2`.
    pub fn with_rotation(w: &DomainMatrixPoint, u1: DMatrix<Complex64>, u2: DMatrix<Complex64>) -> Result<Self> {
        let m = w.size();
        check_unitary(&u1, m)?;
        check_unitary(&u2, m)?;
        Self::build(w.matrix().clone(), u1, u2)
    }

    pub fn size(&self) -> usize {
        self.center.nrows()
    }

    fn apply_matrix(&self, z: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        let m = self.size();
        let inv = invert_guarded(&(DMatrix::identity(m, m) - self.center.adjoint() * z))?;
        Ok(&self.u1 * &self.left_root * (z - &self.center) * inv * &self.right_root * &self.u2)
    }

    pub fn apply(&self, z: &DomainMatrixPoint) -> Result<DomainMatrixPoint> {
        if z.size() != self.size() {
            return Err(Error::Dimension {
                expected: self.size(),
                got: z.size(),
            });
        }
        DomainMatrixPoint::new(self.apply_matrix(z.matrix())?)
    }

    /// Inverse map: undo the rotation, then apply `Phi_{-W}`.
    pub fn inverse_apply(&self, y: &DomainMatrixPoint) -> Result<DomainMatrixPoint> {
        let m = self.size();
        if y.size() != m {
            return Err(Error::Dimension { expected: m, got: y.size() });
        }
        let x = self.u1.adjoint() * y.matrix() * self.u2.adjoint();
        let inv = invert_guarded(&(DMatrix::identity(m, m) + self.center.adjoint() * &x))?;
        DomainMatrixPoint::new(&self.left_root * (x + &self.center) * inv * &self.right_root)
    }

    /// Real differential at `z` in the row-major interleaved chart.
    pub fn differential(&self, z: &DomainMatrixPoint) -> Result<DMatrix<f64>> {
        let m = self.size();
        let id = DMatrix::<Complex64>::identity(m, m);
        let inv = invert_guarded(&(&id - self.center.adjoint() * z.matrix()))?;
        let shift = (z.matrix() - &self.center) * &inv * self.center.adjoint();
        let d = 2 * m * m;
        let mut out = DMatrix::zeros(d, d);
        for k in 0..d {
            let mut e = DMatrix::<Complex64>::zeros(m, m);
            let slot = k / 2;
            e[(slot / m, slot % m)] = if k % 2 == 0 { one() } else { Complex64::new(0.0, 1.0) };
            // d Phi [E] = A (E + (Z - W) M W^* E) M B with M = (I - W^* Z)^{-1}
            let de = &self.u1 * &self.left_root * (&e + &shift * &e) * &inv * &self.right_root * &self.u2;
            out.set_column(k, &numerics::matrix_to_real(&de));
        }
        Ok(out)
    }
}

/// Metric `g(U, V) = Re tr[(I - ZZ^*)^{-1} U (I - Z^*Z)^{-1} V^*]` in the real chart.
pub fn omega1_metric(z: &DomainMatrixPoint) -> RealForm {
    let m = z.size();
    let id = DMatrix::<Complex64>::identity(m, m);
    let p = (&id - z.matrix() * z.matrix().adjoint())
        .try_inverse()
        .expect("defect is positive definite");
    let q = (&id - z.matrix().adjoint() * z.matrix())
        .try_inverse()
        .expect("defect is positive definite");
    let d = 2 * m * m;
    let mut g = DMatrix::zeros(d, d);
    for j in 0..m {
        for k in 0..m {
            let a = 2 * (j * m + k);
            for l in 0..m {
                for s in 0..m {
                    let b = 2 * (l * m + s);
                    let c = p[(l, j)] * q[(k, s)];
                    g[(a, b)] = c.re;
                    g[(a, b + 1)] = c.im;
                    g[(a + 1, b)] = -c.im;
                    g[(a + 1, b + 1)] = c.re;
                }
            }
        }
    }
    RealForm::from_symmetric_unchecked((&g + g.transpose()) * 0.5)
}

/// Riemannian gradient of `D_0` on the diagonal slice:
/// `2 sum_j (1 - |z_jj|^2)(z_jj d/dz_jj + conj(z_jj) d/dconj(z_jj))`.
pub fn diagonal_gradient(diag: &[Complex64]) -> DVector<f64> {
    let m = diag.len();
    let mut out = DVector::zeros(2 * m * m);
    for (j, z) in diag.iter().enumerate() {
        let k = 2 * (j * m + j);
        let f = 2.0 * (1.0 - z.norm_sqr());
        out[k] = f * z.re;
        out[k + 1] = f * z.im;
    }
    out
}

/// Covariant Hessian of `D_0` on the diagonal slice. Entry `(j, k)` carries
/// `2 I / ((1-|z_jj|^2)(1-|z_kk|^2))`, and the holomorphic part couples it to
/// entry `(k, j)` through `-2 Re(conj(z_jj z_kk) dz_jk dz_kj) / den`.
pub fn diagonal_hessian(diag: &[Complex64]) -> RealForm {
    let m = diag.len();
    let mut h = DMatrix::zeros(2 * m * m, 2 * m * m);
    for j in 0..m {
        for k in 0..m {
            let a = 2 * (j * m + k);
            let den = (1.0 - diag[j].norm_sqr()) * (1.0 - diag[k].norm_sqr());
            h[(a, a)] += 2.0 / den;
            h[(a + 1, a + 1)] += 2.0 / den;
            // (2,0) part pairs the (j, k) entry with the (k, j) entry
            let b = 2 * (k * m + j);
            let c = (diag[j] * diag[k]).conj() / den;
            h[(a, b)] -= 2.0 * c.re;
            h[(a + 1, b + 1)] += 2.0 * c.re;
            h[(a, b + 1)] += 2.0 * c.im;
            h[(a + 1, b)] += 2.0 * c.im;
        }
    }
    RealForm::from_symmetric_unchecked(h)
}

/// Isometry `T` with `T(W) = 0` and `T(Z)` diagonal with nonnegative entries
/// in descending order, together with those entries.
fn diagonalizing_isometry(w: &DomainMatrixPoint, z: &DomainMatrixPoint) -> Result<(Omega1Isometry, Vec<f64>)> {
    same_size(w, z)?;
    let m = z.size();
    let y = omega1_mobius(w).apply_matrix(z.matrix())?;
    let svd = y.svd(true, true);
    let u = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = DMatrix::from_fn(m, m, |r, c| u[(r, order[c])]);
    let v_sorted = DMatrix::from_fn(m, m, |r, c| v_t[(order[c], r)].conj());
    let iso = Omega1Isometry::with_rotation(w, u_sorted.adjoint(), v_sorted)?;
    Ok((iso, sigma))
}

/// Riemannian gradient of `D_W` at `Z`, transported from the diagonal slice.
pub fn omega1_grad_diastasis(w: &DomainMatrixPoint, z: &DomainMatrixPoint) -> Result<TangentVector> {
    let (iso, sigma) = diagonalizing_isometry(w, z)?;
    let diag: Vec<Complex64> = sigma.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    let dt = iso.differential(z)?;
    let grad = dt
        .lu()
        .solve(&diagonal_gradient(&diag))
        .ok_or(Error::IllConditioned(f64::INFINITY))?;
    TangentVector::new(z.to_real(), grad)
}

/// Covariant Hessian of `D_W` at `Z`: `dT^T H_diag dT`.
pub fn omega1_hessian_diastasis(w: &DomainMatrixPoint, z: &DomainMatrixPoint) -> Result<RealForm> {
    let (iso, sigma) = diagonalizing_isometry(w, z)?;
    let diag: Vec<Complex64> = sigma.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    let dt = iso.differential(z)?;
    RealForm::symmetrized(dt.transpose() * diagonal_hessian(&diag).matrix() * dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball;
    use crate::numerics::{sample_omega1, seeded_rng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_unitary(seed: u64, m: usize) -> DMatrix<Complex64> {
        let p = sample_omega1(&mut seeded_rng(seed), m, 0.9).unwrap();
        p.matrix().clone().svd(true, false).u.unwrap()
    }

    #[test]
    fn defect_guard() {
        assert!(DomainMatrixPoint::new(DMatrix::identity(2, 2)).is_err());
        assert!(DomainMatrixPoint::new(DMatrix::zeros(2, 3)).is_err());
        let near = DMatrix::from_diagonal_element(2, 2, c(1.0 - 1e-12, 0.0));
        assert!(DomainMatrixPoint::new(near).is_err());
    }

    #[test]
    fn centered_reference_value() {
        let w = DomainMatrixPoint::zero(2);
        let z = DomainMatrixPoint::new(DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(0.0, 0.0)]))).unwrap();
        assert!((omega1_diastasis(&z, &w).unwrap() + 0.75f64.ln()).abs() < 1e-15);
        assert!(omega1_diastasis(&z, &z).unwrap().abs() < 1e-14);
    }

    #[test]
    fn mobius_reduction_matches_closed_form() {
        let mut rng = seeded_rng(31);
        for _ in 0..300 {
            let z = sample_omega1(&mut rng, 2, 0.95).unwrap();
            let w = sample_omega1(&mut rng, 2, 0.95).unwrap();
            let a = omega1_diastasis(&z, &w).unwrap();
            let b = omega1_diastasis_closed_form(&z, &w).unwrap();
            assert!((a - b).abs() < 1e-9 * a.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn isometry_inverts_and_preserves_diastasis() {
        let mut rng = seeded_rng(32);
        for s in 0..50 {
            let w = sample_omega1(&mut rng, 3, 0.9).unwrap();
            let z1 = sample_omega1(&mut rng, 3, 0.9).unwrap();
            let z2 = sample_omega1(&mut rng, 3, 0.9).unwrap();
            let iso = Omega1Isometry::with_rotation(&w, random_unitary(s, 3), random_unitary(s + 100, 3)).unwrap();
            assert!(iso.apply(&w).unwrap().matrix().camax() < 1e-12);
            let back = iso.inverse_apply(&iso.apply(&z1).unwrap()).unwrap();
            assert!((back.matrix() - z1.matrix()).camax() < 1e-10);
            let d0 = omega1_diastasis(&z1, &z2).unwrap();
            let d1 = omega1_diastasis(&iso.apply(&z1).unwrap(), &iso.apply(&z2).unwrap()).unwrap();
            assert!((d0 - d1).abs() < 1e-10 * d0.max(1.0));
        }
    }

    #[test]
    fn zero_center_is_identity() {
        let iso = omega1_mobius(&DomainMatrixPoint::zero(2));
        let z = sample_omega1(&mut seeded_rng(1), 2, 0.8).unwrap();
        assert!((iso.apply(&z).unwrap().matrix() - z.matrix()).camax() < 1e-15);
    }

    #[test]
    fn metric_restricts_to_ball_metric_on_first_row() {
        let mut rng = seeded_rng(33);
        for _ in 0..20 {
            let b = crate::numerics::sample_ball(&mut rng, 3, 0.9).unwrap();
            let mut z = DMatrix::zeros(3, 3);
            for (k, v) in b.coords().iter().enumerate() {
                z[(0, k)] = *v;
            }
            let g = omega1_metric(&DomainMatrixPoint::new(z).unwrap());
            let sub = g.matrix().view((0, 0), (6, 6)).into_owned();
            assert!((sub - ball::metric_matrix(&b).into_matrix()).amax() < 1e-10);
        }
    }

    #[test]
    fn gradient_and_hessian_at_origin() {
        let o = DomainMatrixPoint::zero(2);
        assert!(omega1_grad_diastasis(&o, &o).unwrap().entries().amax() < 1e-15);
        let h = omega1_hessian_diastasis(&o, &o).unwrap();
        assert!((h.matrix() - DMatrix::identity(8, 8) * 2.0).amax() < 1e-14);
    }

    #[test]
    fn gradient_vanishes_at_center() {
        let z = sample_omega1(&mut seeded_rng(34), 2, 0.9).unwrap();
        assert!(omega1_grad_diastasis(&z, &z).unwrap().entries().amax() < 1e-10);
    }
}
