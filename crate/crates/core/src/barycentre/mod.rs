//! Diastatic barycentres of weighted point clouds in `CH^n`, the barycentre
//! map of a cloud, and the operator inequalities controlling its Jacobian.

mod file;
mod map;
mod operators;

pub use file::{AtomSpec, ProblemFile};
pub use map::{discrete_f, jacobian_f, DiscreteBarycentreMap};
pub use operators::{hsuk_bound, hsuk_ratio, lemdet_check, operator_triple, LemdetReport, OperatorTriple};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::ball::{self, BallPoint};
use crate::error::{Error, Result};
use crate::numerics::min_eigenvalue;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 200;
/// Radius the initial iterate is pulled back to when the weighted mean lies outside it.
pub const INITIAL_RADIUS: f64 = 0.99;
const MAX_HALVINGS: usize = 60;

/// Finite weighted point cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<BallPoint>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(BallPoint, f64)>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::InvalidArgument("measure needs at least one atom".into()));
        };
        let n = first.0.dim();
        for (i, (p, w)) in atoms.iter().enumerate() {
            if p.dim() != n {
                return Err(Error::Dimension { expected: n, got: p.dim() });
            }
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::InvalidArgument(format!("weight of atom {i} must be positive and finite, got {w}")));
            }
        }
        let (points, weights) = atoms.into_iter().unzip();
        let m = Self { points, weights };
        if !m.total_weight().is_finite() {
            return Err(Error::InvalidArgument("total weight overflows".into()));
        }
        Ok(m)
    }

    pub fn uniform(points: Vec<BallPoint>) -> Result<Self> {
        Self::new(points.into_iter().map(|p| (p, 1.0)).collect())
    }

    pub fn points(&self) -> &[BallPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Minimize `x -> t sum_i w_i D(img_i, x) + (1 - t) D(anchor, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentreProblem {
    measure: DiscreteMeasure,
    images: Vec<BallPoint>,
    t: f64,
    anchor: BallPoint,
    c: Option<f64>,
}

impl BarycentreProblem {
    pub fn new(measure: DiscreteMeasure, images: Vec<BallPoint>, t: f64, anchor: BallPoint) -> Result<Self> {
        if images.len() != measure.len() {
            return Err(Error::Dimension {
                expected: measure.len(),
                got: images.len(),
            });
        }
        let n = anchor.dim();
        if let Some(bad) = images.iter().find(|p| p.dim() != n) {
            return Err(Error::Dimension { expected: n, got: bad.dim() });
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("homotopy parameter must lie in [0, 1], got {t}")));
        }
        Ok(Self {
            measure,
            images,
            t,
            anchor,
            c: None,
        })
    }

    /// `t = 1`, images equal to the atoms, anchor at the origin (unused).
    pub fn plain(measure: DiscreteMeasure) -> Self {
        let images = measure.points().to_vec();
        let anchor = BallPoint::origin(measure.dim());
        Self {
            measure,
            images,
            t: 1.0,
            anchor,
            c: None,
        }
    }

    /// Exponent recorded alongside the weights; carried through files and reports.
    pub fn with_exponent(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.measure.clone(), self.images.clone(), t, self.anchor.clone()).map(|p| Self { c: self.c, ..p })
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn images(&self) -> &[BallPoint] {
        &self.images
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn anchor(&self) -> &BallPoint {
        &self.anchor
    }

    pub fn exponent(&self) -> Option<f64> {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.anchor.dim()
    }

    /// `(center, coefficient)` pairs of the objective, zero coefficients dropped.
    fn terms(&self) -> Vec<(&BallPoint, f64)> {
        let mut out = Vec::with_capacity(self.images.len() + 1);
        if self.t > 0.0 {
            out.extend(self.images.iter().zip(self.measure.weights()).map(|(p, w)| (p, self.t * w)));
        }
        if self.t < 1.0 {
            out.push((&self.anchor, 1.0 - self.t));
        }
        out
    }

    pub fn objective(&self, x: &BallPoint) -> Result<f64> {
        self.terms().iter().map(|(p, a)| Ok(a * ball::diastasis(p, x)?)).sum()
    }

    /// Chart differential of the objective.
    pub fn differential(&self, x: &BallPoint) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(2 * x.dim());
        for (p, a) in self.terms() {
            out += ball::differential(p, x)? * a;
        }
        Ok(out)
    }

    /// Sum of covariant Hessians; positive definite everywhere.
    pub fn hessian(&self, x: &BallPoint) -> Result<DMatrix<f64>> {
        let d = 2 * x.dim();
        let mut out = DMatrix::zeros(d, d);
        for (p, a) in self.terms() {
            out += ball::hessian_diastasis(p, x)?.into_matrix() * a;
        }
        Ok(out)
    }

    /// Metric norm of the objective's gradient at `x`.
    pub fn residual(&self, x: &BallPoint) -> Result<f64> {
        let alpha = self.differential(x)?;
        Ok(alpha.dot(&(ball::metric_inverse(x) * &alpha)).max(0.0).sqrt())
    }

    fn initial_point(&self) -> BallPoint {
        let n = self.dim();
        let mut mean = vec![Complex64::new(0.0, 0.0); n];
        let mut total = 0.0;
        for (p, a) in self.terms() {
            total += a;
            for (m, z) in mean.iter_mut().zip(p.coords()) {
                *m += z * a;
            }
        }
        mean.iter_mut().for_each(|m| *m /= total);
        let norm = mean.iter().map(|m| m.norm_sqr()).sum::<f64>().sqrt();
        if norm > INITIAL_RADIUS {
            mean.iter_mut().for_each(|m| *m *= INITIAL_RADIUS / norm);
        }
        BallPoint::new(mean).unwrap_or_else(|_| BallPoint::origin(n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarycentreSolution {
    pub point: BallPoint,
    /// Metric norm of the gradient, recomputed at `point`.
    pub residual: f64,
    pub iterations: usize,
    /// Smallest eigenvalue of the objective Hessian seen over all iterates.
    pub min_hessian_eigenvalue: f64,
}

pub fn solve_barycentre(problem: &BarycentreProblem, tol: f64, max_iters: usize) -> Result<BarycentreSolution> {
    solve_from(problem, problem.initial_point(), tol, max_iters)
}

/// Newton iteration started at `start` instead of the weighted mean.
pub fn solve_barycentre_from(
    problem: &BarycentreProblem,
    start: &BallPoint,
    tol: f64,
    max_iters: usize,
) -> Result<BarycentreSolution> {
    if start.dim() != problem.dim() {
        return Err(Error::Dimension {
            expected: problem.dim(),
            got: start.dim(),
        });
    }
    solve_from(problem, start.clone(), tol, max_iters)
}

fn solve_from(problem: &BarycentreProblem, start: BallPoint, tol: f64, max_iters: usize) -> Result<BarycentreSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if problem.t == 0.0 {
        return Ok(BarycentreSolution {
            point: problem.anchor.clone(),
            residual: 0.0,
            iterations: 0,
            min_hessian_eigenvalue: min_eigenvalue(&problem.hessian(&problem.anchor)?),
        });
    }
    let mut x = start;
    let mut value = problem.objective(&x)?;
    let mut residual = problem.residual(&x)?;
    let mut min_eig = f64::INFINITY;
    let mut iterations = 0;
    while residual > tol {
        if iterations == max_iters {
            return Err(Error::NonConvergence {
                iterations,
                residual,
                best: x.to_real().as_slice().to_vec(),
            });
        }
        iterations += 1;
        let hess = problem.hessian(&x)?;
        min_eig = min_eig.min(min_eigenvalue(&hess));
        let grad = problem.differential(&x)?;
        let step = hess
            .cholesky()
            .ok_or(Error::IllConditioned(f64::INFINITY))?
            .solve(&(-grad));
        let base = x.to_real();
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand = &base + &step * lambda;
            if let Ok(y) = BallPoint::from_real(cand.as_slice()) {
                let v = problem.objective(&y)?;
                let r = problem.residual(&y)?;
                if v < value || r < residual {
                    accepted = Some((y, v, r));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((y, v, r)) = accepted else {
            // no step makes progress: the iterate sits at the floating point floor
            return Err(Error::NonConvergence {
                iterations,
                residual,
                best: base.as_slice().to_vec(),
            });
        };
        x = y;
        value = v;
        residual = r;
    }
    min_eig = min_eig.min(min_eigenvalue(&problem.hessian(&x)?));
    Ok(BarycentreSolution {
        residual: problem.residual(&x)?,
        point: x,
        iterations,
        min_hessian_eigenvalue: min_eig,
    })
}

/// Solves along `grid`, warm-starting each solve from the previous answer.
pub fn homotopy_path(problem: &BarycentreProblem, grid: &[f64], tol: f64, max_iters: usize) -> Result<Vec<BallPoint>> {
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("homotopy grid must be sorted".into()));
    }
    let mut out: Vec<BallPoint> = Vec::with_capacity(grid.len());
    for &t in grid {
        let p = problem.with_t(t)?;
        let sol = match out.last() {
            Some(prev) => solve_barycentre_from(&p, prev, tol, max_iters)?,
            None => solve_barycentre(&p, tol, max_iters)?,
        };
        out.push(sol.point);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{sample_ball, seeded_rng};

    fn bp(z: &[(f64, f64)]) -> BallPoint {
        BallPoint::new(z.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn dirac_returns_image() {
        let p = bp(&[(0.3, -0.2), (0.1, 0.4)]);
        let m = DiscreteMeasure::uniform(vec![p.clone()]).unwrap();
        let sol = solve_barycentre(&BarycentreProblem::plain(m), DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(sol.point, p);
        assert!(sol.residual < 1e-15);
    }

    #[test]
    fn symmetric_pair_returns_origin() {
        let m = DiscreteMeasure::uniform(vec![bp(&[(0.4, 0.0)]), bp(&[(-0.4, 0.0)])]).unwrap();
        let sol = solve_barycentre(&BarycentreProblem::plain(m), DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert!(sol.point.norm() < 1e-12);
    }

    #[test]
    fn t_zero_returns_anchor() {
        let m = DiscreteMeasure::uniform(vec![bp(&[(0.4, 0.0)]), bp(&[(0.1, 0.5)])]).unwrap();
        let anchor = bp(&[(-0.7, 0.1)]);
        let p = BarycentreProblem::new(m.clone(), m.points().to_vec(), 0.0, anchor.clone()).unwrap();
        assert_eq!(solve_barycentre(&p, DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap().point, anchor);
    }

    #[test]
    fn random_problems_converge() {
        let mut rng = seeded_rng(41);
        for _ in 0..20 {
            let pts: Vec<_> = (0..7).map(|_| sample_ball(&mut rng, 2, 0.95).unwrap()).collect();
            let m = DiscreteMeasure::uniform(pts).unwrap();
            let sol = solve_barycentre(&BarycentreProblem::plain(m), DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
            assert!(sol.residual <= DEFAULT_TOL);
            assert!(sol.min_hessian_eigenvalue > 0.0);
        }
    }

    #[test]
    fn homotopy_endpoints() {
        let mut rng = seeded_rng(42);
        let pts: Vec<_> = (0..4).map(|_| sample_ball(&mut rng, 1, 0.9).unwrap()).collect();
        let m = DiscreteMeasure::uniform(pts).unwrap();
        let anchor = bp(&[(0.2, 0.2)]);
        let p = BarycentreProblem::new(m.clone(), m.points().to_vec(), 1.0, anchor.clone()).unwrap();
        let path = homotopy_path(&p, &[0.0, 0.5, 1.0], DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(path[0], anchor);
        let direct = solve_barycentre(&p, DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap().point;
        assert!(ball::distance(&path[2], &direct).unwrap() < 1e-9);
        assert!(homotopy_path(&p, &[1.0, 0.0], DEFAULT_TOL, DEFAULT_MAX_ITERS).is_err());
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(DiscreteMeasure::new(vec![(BallPoint::origin(1), 0.0)]).is_err());
        assert!(DiscreteMeasure::new(vec![]).is_err());
    }
}
