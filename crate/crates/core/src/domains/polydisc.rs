use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::ball::{self, BallPoint, BOUNDARY_MARGIN};
use crate::error::{Error, Result};
use crate::numerics::{self, RealForm, TangentVector};

/// Point of the polydisc `{|z_j| < 1}`, the product of `r` copies of `CH^1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolydiscPoint {
    z: Vec<Complex64>,
}

impl PolydiscPoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidArgument("polydisc point needs at least one coordinate".into()));
        }
        for (j, c) in z.iter().enumerate() {
            let m = c.norm();
            if !m.is_finite() || m >= 1.0 - BOUNDARY_MARGIN {
                return Err(Error::domain("|z_j| < 1", format!("|z_{}| = {m}", j + 1)));
            }
        }
        Ok(Self { z })
    }

    pub fn origin(r: usize) -> Self {
        Self {
            z: vec![Complex64::new(0.0, 0.0); r],
        }
    }

    pub fn from_real(x: &[f64]) -> Result<Self> {
        Self::new(numerics::from_real(x)?)
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.z
    }

    pub fn rank(&self) -> usize {
        self.z.len()
    }

    pub fn to_real(&self) -> DVector<f64> {
        numerics::to_real(&self.z)
    }

    /// The `j`-th factor as a point of `CH^1`.
    pub fn factor(&self, j: usize) -> BallPoint {
        BallPoint::new(vec![self.z[j]]).expect("factor inherits the polydisc invariant")
    }
}

fn same_rank(w: &PolydiscPoint, z: &PolydiscPoint) -> Result<()> {
    if w.rank() == z.rank() {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: w.rank(),
            got: z.rank(),
        })
    }
}

/// Sum of the factor diastases.
pub fn polydisc_diastasis(w: &PolydiscPoint, z: &PolydiscPoint) -> Result<f64> {
    same_rank(w, z)?;
    (0..w.rank()).map(|j| ball::diastasis(&w.factor(j), &z.factor(j))).sum()
}

/// Product-metric distance `sqrt(sum rho_j^2)`.
pub fn polydisc_distance(w: &PolydiscPoint, z: &PolydiscPoint) -> Result<f64> {
    same_rank(w, z)?;
    let mut sum = 0.0;
    for j in 0..w.rank() {
        sum += ball::distance(&w.factor(j), &z.factor(j))?.powi(2);
    }
    Ok(sum.sqrt())
}

fn block_diag(blocks: impl Iterator<Item = DMatrix<f64>>, r: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(2 * r, 2 * r);
    for (j, b) in blocks.enumerate() {
        out.view_mut((2 * j, 2 * j), (2, 2)).copy_from(&b);
    }
    out
}

pub fn polydisc_metric(z: &PolydiscPoint) -> RealForm {
    let r = z.rank();
    RealForm::from_symmetric_unchecked(block_diag(
        (0..r).map(|j| ball::metric_matrix(&z.factor(j)).into_matrix()),
        r,
    ))
}

pub fn polydisc_grad_diastasis(w: &PolydiscPoint, x: &PolydiscPoint) -> Result<TangentVector> {
    same_rank(w, x)?;
    let mut out = DVector::zeros(2 * x.rank());
    for j in 0..x.rank() {
        let g = ball::grad_diastasis(&w.factor(j), &x.factor(j))?;
        out.rows_mut(2 * j, 2).copy_from(g.entries());
    }
    TangentVector::new(x.to_real(), out)
}

pub fn polydisc_hessian_diastasis(w: &PolydiscPoint, x: &PolydiscPoint) -> Result<RealForm> {
    same_rank(w, x)?;
    let blocks = (0..x.rank())
        .map(|j| ball::hessian_diastasis(&w.factor(j), &x.factor(j)).map(RealForm::into_matrix))
        .collect::<Result<Vec<_>>>()?;
    Ok(RealForm::from_symmetric_unchecked(block_diag(
        blocks.into_iter(),
        x.rank(),
    )))
}
