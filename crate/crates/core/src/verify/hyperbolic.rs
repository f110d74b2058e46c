use nalgebra::DVector;

use crate::ball::{self, BallPoint, MobiusIsometry};
use crate::error::Result;
use crate::numerics::{
    fd_covariant_hessian, sample_ball, sample_unitary, symmetric_eigenvalues, DEFAULT_HESSIAN_STEP,
};

use super::{rel_err, Runner};

/// Strict bounds are asserted with this margin.
const MARGIN: f64 = 1e-9;

pub(super) fn run(r: &mut Runner) -> Result<()> {
    let cfg = *r.config();
    for n in 1..=3usize {
        let rmax = cfg.rmax;
        let pair = move |rng: &mut rand_chacha::ChaCha8Rng| -> Result<(BallPoint, BallPoint)> {
            Ok((sample_ball(rng, n, rmax)?, sample_ball(rng, n, rmax)?))
        };
        r.max_over(format!("ball{n}.log_cosh_identity"), cfg.samples, 1e-10, |rng| {
            let (w, z) = pair(rng)?;
            let d = ball::diastasis(&w, &z)?;
            Ok((d - 2.0 * ball::distance(&w, &z)?.cosh().ln()).abs())
        })?;
        r.max_over(format!("ball{n}.symmetry"), cfg.samples, 1e-12, |rng| {
            let (w, z) = pair(rng)?;
            Ok((ball::diastasis(&w, &z)? - ball::diastasis(&z, &w)?).abs())
        })?;
        r.max_over(format!("ball{n}.gradient_norm_2tanh"), cfg.samples, 1e-8, |rng| {
            let (w, x) = pair(rng)?;
            let norm = ball::grad_diastasis(&w, &x)?.norm_in(&ball::metric_matrix(&x));
            Ok((norm - 2.0 * ball::distance(&w, &x)?.tanh()).abs())
        })?;
        r.max_over(format!("ball{n}.gradient_below_2"), cfg.samples, 0.0, |rng| {
            let (w, x) = pair(rng)?;
            let norm = ball::grad_diastasis(&w, &x)?.norm_in(&ball::metric_matrix(&x));
            Ok((norm - (2.0 - MARGIN)).max(0.0))
        })?;
        r.max_over(format!("ball{n}.hessian_band"), cfg.samples, 0.0, |rng| {
            let (w, x) = pair(rng)?;
            let ev = ball::hessian_diastasis(&w, &x)?.relative_eigenvalues(&ball::metric_matrix(&x))?;
            Ok((MARGIN - ev[0]).max(ev[ev.len() - 1] - (4.0 - MARGIN)).max(0.0))
        })?;
        let fd_rmax = cfg.fd_rmax;
        r.max_over(format!("ball{n}.hessian_vs_fd"), cfg.fd_samples, 1e-4, |rng| {
            let w = sample_ball(rng, n, fd_rmax)?;
            let x = sample_ball(rng, n, fd_rmax)?;
            let exact = ball::hessian_diastasis(&w, &x)?;
            let fd = fd_covariant_hessian(
                |v: &DVector<f64>| ball::diastasis(&w, &BallPoint::from_real(v.as_slice())?),
                |v: &DVector<f64>| Ok(ball::metric_matrix(&BallPoint::from_real(v.as_slice())?)),
                &x.to_real(),
                DEFAULT_HESSIAN_STEP,
            )?;
            Ok(rel_err(fd.matrix(), exact.matrix(), 1.0))
        })?;
        let mobius = move |rng: &mut rand_chacha::ChaCha8Rng| -> Result<MobiusIsometry> {
            MobiusIsometry::with_unitary(sample_ball(rng, n, rmax)?, sample_unitary(rng, n))
        };
        r.max_over(format!("ball{n}.mobius_invariance"), cfg.samples, 1e-10, |rng| {
            let g = mobius(rng)?;
            let (a, b) = pair(rng)?;
            let d = ball::diastasis(&a, &b)?;
            Ok((ball::diastasis(&g.apply(&a)?, &g.apply(&b)?)? - d).abs() / d.max(1.0))
        })?;
        r.max_over(format!("ball{n}.mobius_hessian_spectrum"), cfg.samples, 1e-8, |rng| {
            let g = mobius(rng)?;
            let (w, x) = pair(rng)?;
            let before = ball::hessian_diastasis(&w, &x)?.relative_eigenvalues(&ball::metric_matrix(&x))?;
            let (gw, gx) = (g.apply(&w)?, g.apply(&x)?);
            let after = ball::hessian_diastasis(&gw, &gx)?.relative_eigenvalues(&ball::metric_matrix(&gx))?;
            Ok(before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        })?;
        r.max_over(format!("ball{n}.mobius_round_trip"), cfg.samples, 1e-10, |rng| {
            let g = mobius(rng)?;
            let z = sample_ball(rng, n, rmax)?;
            Ok((g.inverse_apply(&g.apply(&z)?)?.to_real() - z.to_real()).amax())
        })?;
        r.max_over(format!("ball{n}.metric_commutes_with_j"), cfg.samples.min(200), 1e-12, |rng| {
            let z = sample_ball(rng, n, rmax)?;
            let g = ball::metric_matrix(&z);
            let j = crate::numerics::j_operator(n)?;
            let comm = g.matrix() * j.matrix() - j.matrix() * g.matrix();
            let ev = symmetric_eigenvalues(g.matrix());
            Ok(comm.amax() / ev[ev.len() - 1])
        })?;
    }
    Ok(())
}
