use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::ball::{self, BallPoint};
use crate::error::{Error, Result};
use crate::numerics::{min_eigenvalue, orthonormal_frame, ComplexStructure, RealForm};

use super::map::{DiscreteBarycentreMap, JacobianParts};
use super::discrete_f;

/// `K`, `H` at the barycentre `x` and `H'` at `y`, written in metric-orthonormal
/// frames and normalized by the total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTriple {
    pub k: RealForm,
    pub h: RealForm,
    pub h_prime: RealForm,
    /// Total mass `sum v_i exp(-c D(y, z_i))` the sums were divided by.
    pub mass: f64,
    /// Jacobian of the barycentre map in the same frames.
    pub jacobian: DMatrix<f64>,
}

impl OperatorTriple {
    pub fn dim(&self) -> usize {
        self.k.complex_dim()
    }

    /// `2I - H/2 - J H J / 2`.
    pub fn k_from_h(&self, j: &ComplexStructure) -> DMatrix<f64> {
        let d = self.k.dim();
        let h = self.h.matrix();
        DMatrix::identity(d, d) * 2.0 - h * 0.5 - j.matrix() * h * j.matrix() * 0.5
    }

    /// `|g(K dF u, v)|` and the bound `c |H^{1/2} v| |H'^{1/2} u|` for frame vectors.
    pub fn cauchy_schwarz(&self, c: f64, u: &DVector<f64>, v: &DVector<f64>) -> (f64, f64) {
        let lhs = v.dot(&(self.k.matrix() * &self.jacobian * u)).abs();
        let rhs = c * self.h.eval(v, v).max(0.0).sqrt() * self.h_prime.eval(u, u).max(0.0).sqrt();
        (lhs, rhs)
    }
}

fn outer_sum(vs: &[DVector<f64>], mu: &[f64], frame: &DMatrix<f64>) -> DMatrix<f64> {
    let d = frame.nrows();
    let mut out = DMatrix::zeros(d, d);
    for (v, m) in vs.iter().zip(mu) {
        let e = frame * v;
        out += &e * e.transpose() * *m;
    }
    out
}

/// Operator triple at `y`, with `x` the converged barycentre.
pub fn operator_triple(map: &DiscreteBarycentreMap, y: &BallPoint, x: &BallPoint) -> Result<OperatorTriple> {
    let parts = JacobianParts::new(map, y, x)?;
    let ex = orthonormal_frame(ball::metric_matrix(x).matrix())?;
    let ey = orthonormal_frame(ball::metric_matrix(y).matrix())?;
    // mu is already rescaled to mass one
    let k = RealForm::symmetrized(&ex * &parts.hessian_sum * &ex)?;
    let h = RealForm::symmetrized(outer_sum(&parts.alphas, &parts.mu, &ex))?;
    let h_prime = RealForm::symmetrized(outer_sum(&parts.betas, &parts.mu, &ey))?;
    let ex_inv = ex.clone().try_inverse().ok_or(Error::IllConditioned(f64::INFINITY))?;
    let jacobian = &ex_inv * parts.solve(map.c())? * &ey;
    Ok(OperatorTriple {
        k,
        h,
        h_prime,
        mass: parts.mass,
        jacobian,
    })
}

/// `(1/(2n))^n`, the supremum of [`hsuk_ratio`].
pub fn hsuk_bound(n: usize) -> f64 {
    (1.0 / (2 * n) as f64).powi(n as i32)
}

/// `(det H)^{1/2} / det(2I - H/2 - JHJ/2)` for symmetric positive semidefinite
/// `H` with trace at most 4 and `2I - H/2 - JHJ/2` positive definite.
pub fn hsuk_ratio(h: &RealForm, j: &ComplexStructure) -> Result<f64> {
    if h.dim() != j.matrix().nrows() {
        return Err(Error::Dimension {
            expected: j.matrix().nrows(),
            got: h.dim(),
        });
    }
    let m = h.matrix();
    let scale = m.amax().max(1.0);
    if min_eigenvalue(m) < -1e-12 * scale {
        return Err(Error::InvalidArgument("H must be positive semidefinite".into()));
    }
    if h.trace() > 4.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("trace of H is {} > 4", h.trace())));
    }
    let d = h.dim();
    let k = DMatrix::identity(d, d) * 2.0 - m * 0.5 - j.matrix() * m * j.matrix() * 0.5;
    if min_eigenvalue(&k) <= 0.0 {
        return Err(Error::InvalidArgument("2I - H/2 - JHJ/2 is not positive definite".into()));
    }
    Ok(m.determinant().max(0.0).sqrt() / k.determinant())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemdetReport {
    /// `|det K| |det dF|` in orthonormal frames.
    pub lhs: f64,
    /// `(X^2 c^2 / (2n))^n (det H)^{1/2}` with `X = 2`.
    pub rhs: f64,
    pub holds: bool,
    /// Set when the map was built with `c <= n`.
    pub relaxed: bool,
}

/// Determinant inequality at `y`. Needs a cloud with at least two distinct
/// images, otherwise both sides vanish.
pub fn lemdet_check(map: &DiscreteBarycentreMap, y: &BallPoint) -> Result<LemdetReport> {
    let first = &map.images()[0];
    if map.images().iter().all(|p| p == first) {
        return Err(Error::InvalidArgument("cloud images are collocated".into()));
    }
    let x = discrete_f(map, y)?;
    let ops = operator_triple(map, y, &x)?;
    let n = map.dim() as f64;
    let c = map.c();
    let lhs = ops.k.matrix().determinant().abs() * ops.jacobian.determinant().abs();
    let rhs = (4.0 * c * c / (2.0 * n)).powf(n) * ops.h.matrix().determinant().max(0.0).sqrt();
    Ok(LemdetReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-8),
        relaxed: map.is_relaxed(),
    })
}
