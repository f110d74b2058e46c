//! Complex hyperbolic space `CH^n` realized as the unit ball of `C^n`, with
//! the Kähler metric of holomorphic sectional curvature `-4` whose potential is
//! `-log(1 - |z|^2)`.
//!
//! All derivative objects are expressed in the interleaved real chart (see
//! [`crate::numerics`]). Hessians are covariant (Levi-Civita) Hessians; the
//! plain chart Hessian is available separately as [`chart_hessian_diastasis`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{self, j_operator, RealForm, TangentVector};

/// Points closer than this to the unit sphere are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

/// Point of the open unit ball in `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    z: Vec<Complex64>,
}

impl BallPoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidArgument("ball point needs at least one coordinate".into()));
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::domain("|z| < 1", "non-finite coordinate"));
        }
        let norm = norm_sqr(&z).sqrt();
        if norm >= 1.0 - BOUNDARY_MARGIN {
            return Err(Error::domain("|z| < 1", format!("|z| = {norm}")));
        }
        Ok(Self { z })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            z: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Build from interleaved real coordinates.
    pub fn from_real(x: &[f64]) -> Result<Self> {
        Self::new(numerics::from_real(x)?)
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.z
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.z)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn to_real(&self) -> DVector<f64> {
        numerics::to_real(&self.z)
    }
}

fn norm_sqr(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

/// Hermitian product `<z, w> = sum z_j conj(w_j)`.
pub(crate) fn inner(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

fn same_dim(w: &BallPoint, z: &BallPoint) -> Result<()> {
    if w.dim() == z.dim() {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: w.dim(),
            got: z.dim(),
        })
    }
}

/// `|1 - <z, w>|^2 - (1 - |z|^2)(1 - |w|^2)`, evaluated as
/// `|z - w|^2 - sum_{j<k} |z_j w_k - z_k w_j|^2` so it stays accurate when the
/// points nearly coincide.
fn separation(w: &[Complex64], z: &[Complex64]) -> f64 {
    let diff: f64 = z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum();
    let mut lagrange = 0.0;
    for j in 0..z.len() {
        for k in j + 1..z.len() {
            lagrange += (z[j] * w[k] - z[k] * w[j]).norm_sqr();
        }
    }
    (diff - lagrange).max(0.0)
}

/// Calabi diastasis `-log[(1-|z|^2)(1-|w|^2) / |1 - <z,w>|^2]`.
pub fn diastasis(w: &BallPoint, z: &BallPoint) -> Result<f64> {
    same_dim(w, z)?;
    let den = (1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr());
    Ok((separation(&w.z, &z.z) / den).ln_1p())
}

/// Geodesic distance `arccosh(exp(D/2))`, evaluated as `asinh(sqrt(expm1(D)))`.
pub fn distance(w: &BallPoint, z: &BallPoint) -> Result<f64> {
    let d = diastasis(w, z)?;
    Ok(d.exp_m1().sqrt().asinh())
}

/// Metric tensor `G(z) = I/(1-|z|^2) + (z z^T + Jz (Jz)^T)/(1-|z|^2)^2` in the
/// real chart. `G(0) = I`.
pub fn metric_matrix(z: &BallPoint) -> RealForm {
    let s = 1.0 - z.norm_sqr();
    let zr = z.to_real();
    let jz = rotate(&zr);
    let d = zr.len();
    let g = DMatrix::identity(d, d) / s + (&zr * zr.transpose() + &jz * jz.transpose()) / (s * s);
    RealForm::from_symmetric_unchecked(g)
}

/// Closed-form inverse of [`metric_matrix`]: `(1-|z|^2)(I - z z^T - Jz (Jz)^T)`.
pub fn metric_inverse(z: &BallPoint) -> DMatrix<f64> {
    let s = 1.0 - z.norm_sqr();
    let zr = z.to_real();
    let jz = rotate(&zr);
    let d = zr.len();
    (DMatrix::identity(d, d) - &zr * zr.transpose() - &jz * jz.transpose()) * s
}

fn rotate(v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for k in 0..v.len() / 2 {
        out[2 * k] = -v[2 * k + 1];
        out[2 * k + 1] = v[2 * k];
    }
    out
}

/// Chart differential `d_x D_w` as a real covector.
pub fn differential(w: &BallPoint, x: &BallPoint) -> Result<DVector<f64>> {
    same_dim(w, x)?;
    let s = 1.0 - x.norm_sqr();
    let a = Complex64::new(1.0, 0.0) - inner(&x.z, &w.z);
    let mut out = DVector::zeros(2 * x.dim());
    for j in 0..x.dim() {
        let c = x.z[j].conj() / s - w.z[j].conj() / a;
        out[2 * j] = 2.0 * c.re;
        out[2 * j + 1] = -2.0 * c.im;
    }
    Ok(out)
}

/// Riemannian gradient of `D_w` at `x`: the inverse metric applied to the
/// differential. Its metric norm is `2 tanh(rho(w, x)) < 2`.
pub fn grad_diastasis(w: &BallPoint, x: &BallPoint) -> Result<TangentVector> {
    let alpha = differential(w, x)?;
    TangentVector::new(x.to_real(), metric_inverse(x) * alpha)
}

/// Covariant Hessian `2 G - 1/2 a (x) a + 1/2 (a o J) (x) (a o J)` with `a = d_x D_w`.
pub fn hessian_diastasis(w: &BallPoint, x: &BallPoint) -> Result<RealForm> {
    let alpha = differential(w, x)?;
    let j = j_operator(x.dim())?;
    let aj = j.pullback(&alpha);
    let h = metric_matrix(x).into_matrix() * 2.0 - (&alpha * alpha.transpose()) * 0.5
        + (&aj * aj.transpose()) * 0.5;
    Ok(RealForm::from_symmetric_unchecked(h))
}

/// Plain second derivatives of `D_w` in the real chart.
pub fn chart_hessian_diastasis(w: &BallPoint, x: &BallPoint) -> Result<RealForm> {
    same_dim(w, x)?;
    let s = 1.0 - x.norm_sqr();
    let xr = x.to_real();
    let wr = w.to_real();
    let wj = rotate(&wr);
    let one_minus_a = Complex64::new(1.0, 0.0) - inner(&x.z, &w.z);
    let e = (one_minus_a * one_minus_a).inv();
    let d = xr.len();
    let h = DMatrix::identity(d, d) * (2.0 / s) + (&xr * xr.transpose()) * (4.0 / (s * s))
        - ((&wr * wr.transpose() - &wj * wj.transpose()) * e.re
            - (&wr * wj.transpose() + &wj * wr.transpose()) * e.im)
            * 2.0;
    RealForm::symmetrized(h)
}

/// Holomorphic isometry of the ball sending `center` to the origin, followed
/// by a unitary rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusIsometry {
    center: BallPoint,
    unitary: DMatrix<Complex64>,
}

/// The standard automorphism moving `w` to `0`, with identity post-rotation.
pub fn mobius(w: &BallPoint) -> MobiusIsometry {
    let n = w.dim();
    MobiusIsometry {
        center: w.clone(),
        unitary: DMatrix::identity(n, n),
    }
}

impl MobiusIsometry {
    pub fn with_unitary(center: BallPoint, unitary: DMatrix<Complex64>) -> Result<Self> {
        let n = center.dim();
        if unitary.shape() != (n, n) {
            return Err(Error::Dimension {
                expected: n,
                got: unitary.nrows(),
            });
        }
        let defect = (&unitary * unitary.adjoint() - DMatrix::identity(n, n)).camax();
        if defect > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "post-rotation is not unitary (defect {defect:e})"
            )));
        }
        Ok(Self { center, unitary })
    }

    pub fn center(&self) -> &BallPoint {
        &self.center
    }

    pub fn unitary(&self) -> &DMatrix<Complex64> {
        &self.unitary
    }

    /// `U (P_a z - a + s_a Q_a z) / (1 - <z, a>)` with `a` the center,
    /// `P_a` the projection on `a`, `Q_a = I - P_a` and `s_a = sqrt(1 - |a|^2)`.
    pub fn apply(&self, z: &BallPoint) -> Result<BallPoint> {
        same_dim(&self.center, z)?;
        let a = &self.center.z;
        let y: Vec<Complex64> = involution(a, &z.z).into_iter().map(|c| -c).collect();
        BallPoint::new(mat_vec(&self.unitary, &y))
    }

    pub fn inverse_apply(&self, y: &BallPoint) -> Result<BallPoint> {
        same_dim(&self.center, y)?;
        let back: Vec<Complex64> = mat_vec(&self.unitary.adjoint(), &y.z)
            .into_iter()
            .map(|c| -c)
            .collect();
        BallPoint::new(involution(&self.center.z, &back))
    }
}

/// The involutive automorphism `phi_a(z) = (a - P_a z - s_a Q_a z)/(1 - <z,a>)`.
fn involution(a: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
    let aa = norm_sqr(a);
    let za = inner(z, a);
    let sa = (1.0 - aa).sqrt();
    let den = Complex64::new(1.0, 0.0) - za;
    z.iter()
        .zip(a)
        .map(|(&zj, &aj)| {
            let pz = if aa > 0.0 { aj * (za / aa) } else { Complex64::new(0.0, 0.0) };
            (aj - pz - (zj - pz) * sa) / den
        })
        .collect()
}

fn mat_vec(m: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{fd_gradient, fd_hessian, sample_ball, seeded_rng, symmetric_eigenvalues};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(z: &[(f64, f64)]) -> BallPoint {
        BallPoint::new(z.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    #[test]
    fn boundary_points_are_rejected() {
        assert!(BallPoint::new(vec![c(1.0, 0.0)]).is_err());
        assert!(BallPoint::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).is_err());
        assert!(BallPoint::new(vec![c(1.0 - 1e-13, 0.0)]).is_err());
        assert!(BallPoint::new(vec![c(1.0 - 1e-9, 0.0)]).is_ok());
        assert!(BallPoint::new(vec![]).is_err());
    }

    #[test]
    fn diastasis_reference_values() {
        let o = BallPoint::origin(2);
        assert_eq!(diastasis(&o, &o).unwrap(), 0.0);
        let z = pt(&[(0.5, 0.0), (0.0, 0.0)]);
        // -log(0.75)
        assert!((diastasis(&o, &z).unwrap() - 0.287_682_072_451_780_9).abs() < 1e-15);
    }

    #[test]
    fn distance_reference_value_and_dimension_mismatch() {
        let o = BallPoint::origin(1);
        let z = pt(&[(0.5, 0.0)]);
        // arctanh(0.5)
        assert!((distance(&o, &z).unwrap() - 0.549_306_144_334_054_8).abs() < 1e-14);
        assert_eq!(distance(&z, &z).unwrap(), 0.0);
        assert!(diastasis(&o, &BallPoint::origin(2)).is_err());
    }

    #[test]
    fn metric_at_origin_is_identity_and_disc_is_conformal() {
        assert_eq!(metric_matrix(&BallPoint::origin(3)).matrix(), &DMatrix::identity(6, 6));
        let z = pt(&[(0.3, -0.4)]);
        let g = metric_matrix(&z);
        let f = 1.0 / (1.0 - 0.25f64).powi(2);
        assert!((g.matrix() - DMatrix::identity(2, 2) * f).amax() < 1e-13);
    }

    #[test]
    fn metric_commutes_with_j_and_inverse_is_exact() {
        let mut rng = seeded_rng(2);
        let j = j_operator(3).unwrap();
        for _ in 0..20 {
            let z = sample_ball(&mut rng, 3, 0.95).unwrap();
            let g = metric_matrix(&z);
            assert!((g.matrix() * j.matrix() - j.matrix() * g.matrix()).amax() < 1e-10);
            let id = g.matrix() * metric_inverse(&z);
            assert!((id - DMatrix::identity(6, 6)).amax() < 1e-10);
        }
    }

    #[test]
    fn metric_is_half_hessian_at_center() {
        let mut rng = seeded_rng(4);
        for _ in 0..20 {
            let z = sample_ball(&mut rng, 2, 0.9).unwrap();
            let h = hessian_diastasis(&z, &z).unwrap();
            assert!((h.matrix() * 0.5 - metric_matrix(&z).matrix()).amax() < 1e-8);
        }
    }

    #[test]
    fn gradient_vanishes_at_center_and_has_unit_norm_at_half() {
        let z = pt(&[(0.2, 0.1), (-0.3, 0.4)]);
        assert!(grad_diastasis(&z, &z).unwrap().entries().amax() < 1e-15);
        let o = BallPoint::origin(1);
        let x = pt(&[(0.5, 0.0)]);
        let g = grad_diastasis(&o, &x).unwrap();
        assert!((g.norm_in(&metric_matrix(&x)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hessian_at_origin_is_twice_identity() {
        let o = BallPoint::origin(2);
        let h = hessian_diastasis(&o, &o).unwrap();
        assert!((h.matrix() - DMatrix::identity(4, 4) * 2.0).amax() < 1e-15);
    }

    #[test]
    fn finite_differences_match_at_point_three() {
        let o = BallPoint::origin(1);
        let x = pt(&[(0.3, 0.0)]);
        let f = |v: &DVector<f64>| diastasis(&o, &BallPoint::from_real(v.as_slice())?);
        let g = fd_gradient(f, &x.to_real(), 1e-4).unwrap();
        let riem = metric_inverse(&x) * g;
        assert!((riem - grad_diastasis(&o, &x).unwrap().into_entries()).amax() < 1e-6);
        let h = fd_hessian(f, &x.to_real(), 1e-3).unwrap();
        let exact = chart_hessian_diastasis(&o, &x).unwrap();
        assert!((h.matrix() - exact.matrix()).amax() < 1e-4);
    }

    #[test]
    fn normalized_hessian_spectrum_in_open_band() {
        let mut rng = seeded_rng(8);
        for _ in 0..200 {
            let w = sample_ball(&mut rng, 3, 0.95).unwrap();
            let x = sample_ball(&mut rng, 3, 0.95).unwrap();
            let ev = hessian_diastasis(&w, &x)
                .unwrap()
                .relative_eigenvalues(&metric_matrix(&x))
                .unwrap();
            assert!(ev[0] > 0.0 && *ev.last().unwrap() < 4.0, "{ev:?}");
            assert!(symmetric_eigenvalues(hessian_diastasis(&w, &x).unwrap().matrix())[0] > 0.0);
        }
    }

    #[test]
    fn mobius_sends_center_to_origin_and_inverts() {
        let mut rng = seeded_rng(9);
        for _ in 0..50 {
            let w = sample_ball(&mut rng, 2, 0.9).unwrap();
            let z = sample_ball(&mut rng, 2, 0.9).unwrap();
            let m = mobius(&w);
            assert!(m.apply(&w).unwrap().norm() < 1e-12);
            let back = m.inverse_apply(&m.apply(&z).unwrap()).unwrap();
            assert!((back.to_real() - z.to_real()).amax() < 1e-10);
        }
    }

    #[test]
    fn mobius_at_origin_is_the_rotation() {
        let u = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let m = MobiusIsometry::with_unitary(BallPoint::origin(2), u).unwrap();
        let z = pt(&[(0.1, 0.2), (0.3, -0.1)]);
        let y = m.apply(&z).unwrap();
        assert!((y.coords()[0] - c(-0.2, 0.1)).norm() < 1e-15);
        assert!((y.coords()[1] - c(-0.3, 0.1)).norm() < 1e-15);
        let bad = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(MobiusIsometry::with_unitary(BallPoint::origin(2), bad).is_err());
    }

    #[test]
    fn mobius_derivative_is_positive_along_center_axis() {
        let w = pt(&[(0.4, 0.0), (0.0, 0.0)]);
        let m = mobius(&w);
        let ahead = pt(&[(0.41, 0.0), (0.0, 0.0)]);
        let y = m.apply(&ahead).unwrap();
        assert!(y.coords()[0].re > 0.0 && y.coords()[0].im.abs() < 1e-15);
    }
}
