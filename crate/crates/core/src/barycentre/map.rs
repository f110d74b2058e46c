use nalgebra::{DMatrix, DVector};

use crate::ball::{self, BallPoint, MobiusIsometry};
use crate::error::{Error, Result};
use crate::numerics::condition_number;

use super::{solve_barycentre, BarycentreProblem, DiscreteMeasure};

/// Solver tolerance used inside the barycentre map.
const MAP_TOL: f64 = 1e-12;
const MAP_MAX_ITERS: usize = 200;
/// Residual above which a point is not accepted as the barycentre.
pub const CONVERGED_RESIDUAL: f64 = 1e-10;
/// Largest accepted condition number of the Hessian sum.
pub const MAX_CONDITION: f64 = 1e12;

/// `y -> ` barycentre of the cloud reweighted by `v_i exp(-c D(y, z_i))`
/// and pushed forward by `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBarycentreMap {
    cloud: Vec<BallPoint>,
    weights: Vec<f64>,
    images: Vec<BallPoint>,
    f: Option<MobiusIsometry>,
    c: f64,
    relaxed: bool,
}

impl DiscreteBarycentreMap {
    /// Requires `c > n`.
    pub fn new(cloud: DiscreteMeasure, f: Option<MobiusIsometry>, c: f64) -> Result<Self> {
        let n = cloud.dim();
        if !(c > n as f64) {
            return Err(Error::InvalidArgument(format!("exponent must exceed the dimension {n}, got c = {c}")));
        }
        Self::build(cloud, f, c, false)
    }

    /// Accepts any positive `c`; the map reports itself as relaxed.
    pub fn relaxed(cloud: DiscreteMeasure, f: Option<MobiusIsometry>, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("exponent must be positive, got {c}")));
        }
        let relaxed = c <= cloud.dim() as f64;
        Self::build(cloud, f, c, relaxed)
    }

    fn build(cloud: DiscreteMeasure, f: Option<MobiusIsometry>, c: f64, relaxed: bool) -> Result<Self> {
        let images = match &f {
            Some(g) => {
                if g.center().dim() != cloud.dim() {
                    return Err(Error::Dimension {
                        expected: cloud.dim(),
                        got: g.center().dim(),
                    });
                }
                cloud.points().iter().map(|z| g.apply(z)).collect::<Result<_>>()?
            }
            None => cloud.points().to_vec(),
        };
        Ok(Self {
            cloud: cloud.points().to_vec(),
            weights: cloud.weights().to_vec(),
            images,
            f,
            c,
            relaxed,
        })
    }

    pub fn cloud(&self) -> &[BallPoint] {
        &self.cloud
    }

    pub fn base_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn images(&self) -> &[BallPoint] {
        &self.images
    }

    pub fn isometry(&self) -> Option<&MobiusIsometry> {
        self.f.as_ref()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.cloud[0].dim()
    }

    /// True when `c <= n` was allowed through [`DiscreteBarycentreMap::relaxed`].
    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    /// Weights `v_i exp(-c D(y, z_i))` rescaled to total mass one, and the
    /// unscaled total.
    pub fn weights_at(&self, y: &BallPoint) -> Result<(Vec<f64>, f64)> {
        let logs = self
            .cloud
            .iter()
            .zip(&self.weights)
            .map(|(z, v)| Ok(v.ln() - self.c * ball::diastasis(y, z)?))
            .collect::<Result<Vec<f64>>>()?;
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let shifted: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let sum: f64 = shifted.iter().sum();
        Ok((shifted.iter().map(|s| s / sum).collect(), sum * top.exp()))
    }

    pub(crate) fn problem_at(&self, y: &BallPoint) -> Result<BarycentreProblem> {
        let (mu, _) = self.weights_at(y)?;
        let atoms = self.cloud.iter().cloned().zip(mu.iter().map(|m| m.max(f64::MIN_POSITIVE))).collect();
        BarycentreProblem::new(DiscreteMeasure::new(atoms)?, self.images.clone(), 1.0, y.clone())
    }
}

/// The barycentre map at `y`.
pub fn discrete_f(map: &DiscreteBarycentreMap, y: &BallPoint) -> Result<BallPoint> {
    if y.dim() != map.dim() {
        return Err(Error::Dimension {
            expected: map.dim(),
            got: y.dim(),
        });
    }
    Ok(solve_barycentre(&map.problem_at(y)?, MAP_TOL, MAP_MAX_ITERS)?.point)
}

/// Chart Jacobian of the barycentre map at `y`, where `x` is the barycentre:
/// solves `A dF = c B` with `A = sum mu_i Hess_x D_{f(z_i)}` and
/// `B = sum mu_i d_x D_{f(z_i)} (x) d_y D_{z_i}`.
pub fn jacobian_f(map: &DiscreteBarycentreMap, y: &BallPoint, x: &BallPoint) -> Result<DMatrix<f64>> {
    let parts = JacobianParts::new(map, y, x)?;
    parts.solve(map.c)
}

/// The sums entering the Jacobian, in the chart.
pub(crate) struct JacobianParts {
    pub mu: Vec<f64>,
    pub mass: f64,
    pub hessian_sum: DMatrix<f64>,
    pub alphas: Vec<DVector<f64>>,
    pub betas: Vec<DVector<f64>>,
}

impl JacobianParts {
    pub fn new(map: &DiscreteBarycentreMap, y: &BallPoint, x: &BallPoint) -> Result<Self> {
        let problem = map.problem_at(y)?;
        let residual = problem.residual(x)?;
        if residual > CONVERGED_RESIDUAL {
            return Err(Error::InvalidArgument(format!(
                "point is not the barycentre (residual {residual:e})"
            )));
        }
        let (mu, mass) = map.weights_at(y)?;
        let d = 2 * map.dim();
        let mut hessian_sum = DMatrix::zeros(d, d);
        let mut alphas = Vec::with_capacity(mu.len());
        let mut betas = Vec::with_capacity(mu.len());
        for ((img, z), m) in map.images.iter().zip(&map.cloud).zip(&mu) {
            hessian_sum += ball::hessian_diastasis(img, x)?.into_matrix() * *m;
            alphas.push(ball::differential(img, x)?);
            betas.push(ball::differential(z, y)?);
        }
        Ok(Self {
            mu,
            mass,
            hessian_sum,
            alphas,
            betas,
        })
    }

    pub fn mixed_sum(&self) -> DMatrix<f64> {
        let d = self.hessian_sum.nrows();
        let mut b = DMatrix::zeros(d, d);
        for ((a, bt), m) in self.alphas.iter().zip(&self.betas).zip(&self.mu) {
            b += a * bt.transpose() * *m;
        }
        b
    }

    pub fn solve(&self, c: f64) -> Result<DMatrix<f64>> {
        let cond = condition_number(&self.hessian_sum);
        if !cond.is_finite() || cond > MAX_CONDITION {
            return Err(Error::IllConditioned(cond));
        }
        let chol = self
            .hessian_sum
            .clone()
            .cholesky()
            .ok_or(Error::IllConditioned(f64::INFINITY))?;
        Ok(chol.solve(&(self.mixed_sum() * c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{fd_jacobian, sample_ball, seeded_rng};
    use num_complex::Complex64;

    fn cloud(seed: u64, n: usize, k: usize) -> DiscreteMeasure {
        let mut rng = seeded_rng(seed);
        DiscreteMeasure::uniform((0..k).map(|_| sample_ball(&mut rng, n, 0.8).unwrap()).collect()).unwrap()
    }

    #[test]
    fn guard_on_exponent() {
        assert!(DiscreteBarycentreMap::new(cloud(1, 2, 3), None, 2.0).is_err());
        let m = DiscreteBarycentreMap::relaxed(cloud(1, 2, 3), None, 1.5).unwrap();
        assert!(m.is_relaxed());
    }

    #[test]
    fn symmetric_cloud_fixes_origin() {
        let a = BallPoint::new(vec![Complex64::new(0.3, 0.2)]).unwrap();
        let b = BallPoint::new(vec![Complex64::new(-0.3, -0.2)]).unwrap();
        let map = DiscreteBarycentreMap::new(DiscreteMeasure::uniform(vec![a, b]).unwrap(), None, 2.0).unwrap();
        assert!(discrete_f(&map, &BallPoint::origin(1)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn dirac_cloud_is_constant() {
        let z = BallPoint::new(vec![Complex64::new(0.1, 0.5)]).unwrap();
        let map = DiscreteBarycentreMap::new(DiscreteMeasure::uniform(vec![z.clone()]).unwrap(), None, 3.0).unwrap();
        let y = BallPoint::new(vec![Complex64::new(-0.4, 0.0)]).unwrap();
        assert_eq!(discrete_f(&map, &y).unwrap(), z);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let map = DiscreteBarycentreMap::new(cloud(7, 2, 6), None, 3.0).unwrap();
        let y = sample_ball(&mut seeded_rng(8), 2, 0.5).unwrap();
        let x = discrete_f(&map, &y).unwrap();
        let jac = jacobian_f(&map, &y, &x).unwrap();
        let fd = fd_jacobian(
            |v: &DVector<f64>| Ok(discrete_f(&map, &BallPoint::from_real(v.as_slice())?)?.to_real()),
            &y.to_real(),
            1e-5,
        )
        .unwrap();
        assert!((&jac - &fd).norm() <= 1e-4 * jac.norm(), "{jac} vs {fd}");
    }

    #[test]
    fn rejects_unconverged_point() {
        let map = DiscreteBarycentreMap::new(cloud(9, 1, 4), None, 2.0).unwrap();
        let y = BallPoint::origin(1);
        let far = BallPoint::new(vec![Complex64::new(0.9, 0.0)]).unwrap();
        assert!(jacobian_f(&map, &y, &far).is_err());
    }
}
