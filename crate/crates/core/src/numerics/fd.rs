//! Central finite-difference oracles.
//!
//! These never call into the analytic derivative code they are used to check;
//! they only evaluate the scalar (or vector) function itself.

use nalgebra::{DMatrix, DVector};

use super::RealForm;
use crate::error::{Error, Result};

pub const DEFAULT_GRADIENT_STEP: f64 = 1e-4;
pub const DEFAULT_HESSIAN_STEP: f64 = 1e-3;
/// Step for differentiating a metric tensor field (Christoffel terms).
pub const DEFAULT_METRIC_STEP: f64 = 1e-5;

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")))
    }
}

fn shifted(x: &DVector<f64>, i: usize, hi: f64) -> DVector<f64> {
    let mut y = x.clone();
    y[i] += hi;
    y
}

fn shifted2(x: &DVector<f64>, i: usize, hi: f64, j: usize, hj: f64) -> DVector<f64> {
    let mut y = x.clone();
    y[i] += hi;
    y[j] += hj;
    y
}

/// Central-difference gradient, error `O(h^2)`.
pub fn fd_gradient<F>(f: F, x: &DVector<f64>, h: f64) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Result<f64>,
{
    check_step(h)?;
    let mut g = DVector::zeros(x.len());
    for i in 0..x.len() {
        let fp = f(&shifted(x, i, h))?;
        let fm = f(&shifted(x, i, -h))?;
        g[i] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

/// Central-difference Hessian in the chart (no connection terms), symmetrized.
pub fn fd_hessian<F>(f: F, x: &DVector<f64>, h: f64) -> Result<RealForm>
where
    F: Fn(&DVector<f64>) -> Result<f64>,
{
    check_step(h)?;
    let d = x.len();
    let f0 = f(x)?;
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        let fp = f(&shifted(x, i, h))?;
        let fm = f(&shifted(x, i, -h))?;
        m[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let fpp = f(&shifted2(x, i, h, j, h))?;
            let fpm = f(&shifted2(x, i, h, j, -h))?;
            let fmp = f(&shifted2(x, i, -h, j, h))?;
            let fmm = f(&shifted2(x, i, -h, j, -h))?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    RealForm::symmetrized(m)
}

/// Finite-difference covariant Hessian `nabla d f` of a scalar function on a
/// Riemannian chart: the chart Hessian minus the Levi-Civita correction
/// `Gamma^k_ij d_k f`, with the Christoffel symbols obtained by differencing the
/// metric field.
pub fn fd_covariant_hessian<F, G>(f: F, metric: G, x: &DVector<f64>, h: f64) -> Result<RealForm>
where
    F: Fn(&DVector<f64>) -> Result<f64>,
    G: Fn(&DVector<f64>) -> Result<RealForm>,
{
    let d = x.len();
    let chart = fd_hessian(&f, x, h)?;
    let grad = fd_gradient(&f, x, DEFAULT_GRADIENT_STEP)?;
    let hm = DEFAULT_METRIC_STEP;
    let mut dg = Vec::with_capacity(d);
    for k in 0..d {
        let gp = metric(&shifted(x, k, hm))?;
        let gm = metric(&shifted(x, k, -hm))?;
        dg.push((gp.matrix() - gm.matrix()) / (2.0 * hm));
    }
    let g0 = metric(x)?;
    let ginv = g0
        .matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("metric is singular".into()))?;
    // lowered correction sum_l Gamma_{l,ij} * (G^{-1} grad)_l
    let raised = &ginv * &grad;
    let mut corr = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for l in 0..d {
                let gamma_lij = 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                s += gamma_lij * raised[l];
            }
            corr[(i, j)] = s;
        }
    }
    RealForm::symmetrized(chart.matrix() - corr)
}

/// Central-difference Jacobian of a vector map; column `j` is `dF/dx_j`.
pub fn fd_jacobian<F>(f: F, x: &DVector<f64>, h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    check_step(h)?;
    let mut cols = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let fp = f(&shifted(x, j, h))?;
        let fm = f(&shifted(x, j, -h))?;
        cols.push((fp - fm) / (2.0 * h));
    }
    let rows = cols.first().map_or(0, |c| c.len());
    Ok(DMatrix::from_fn(rows, x.len(), |i, j| cols[j][i]))
}
