use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::domains::{
    self, diagonal_gradient, diagonal_hessian, omega1_diastasis, omega1_diastasis_closed_form,
    omega1_grad_diastasis, omega1_hessian_diastasis, omega1_metric, verify_hereditary, DomainMatrixPoint,
    Embedding, Omega1Isometry,
};
use crate::error::Result;
use crate::numerics::{
    fd_covariant_hessian, fd_gradient, sample_omega1, sample_polydisc, sample_unitary, DEFAULT_GRADIENT_STEP,
    DEFAULT_HESSIAN_STEP,
};

use super::{rel_err, Runner};

const MARGIN: f64 = 1e-9;
const M: usize = 2;

fn from_real(v: &DVector<f64>) -> Result<DomainMatrixPoint> {
    DomainMatrixPoint::from_real(v.as_slice(), M)
}

fn diagonal_point(rng: &mut ChaCha8Rng, rmax: f64) -> Result<(Vec<Complex64>, DomainMatrixPoint)> {
    let d = sample_polydisc(rng, M, rmax)?;
    let diag = d.coords().to_vec();
    let z = DomainMatrixPoint::new(DMatrix::from_diagonal(&DVector::from_vec(diag.clone())))?;
    Ok((diag, z))
}

pub(super) fn run(r: &mut Runner) -> Result<()> {
    let cfg = *r.config();
    let rmax = cfg.rmax;

    for rank in [2usize, 3] {
        r.max_over(format!("polydisc{rank}.log_cosh_inequality"), cfg.samples, 1e-12, |rng| {
            let w = sample_polydisc(rng, rank, rmax)?;
            let z = sample_polydisc(rng, rank, rmax)?;
            let d = domains::polydisc_diastasis(&w, &z)?;
            Ok((2.0 * domains::polydisc_distance(&w, &z)?.cosh().ln() - d).max(0.0))
        })?;
    }

    let pair = move |rng: &mut ChaCha8Rng| -> Result<(DomainMatrixPoint, DomainMatrixPoint)> {
        Ok((sample_omega1(rng, M, rmax)?, sample_omega1(rng, M, rmax)?))
    };
    r.max_over("omega1-2.closed_form_vs_mobius", cfg.samples, 1e-9, |rng| {
        let (z, w) = pair(rng)?;
        let a = omega1_diastasis(&z, &w)?;
        Ok((a - omega1_diastasis_closed_form(&z, &w)?).abs() / a.max(1.0))
    })?;
    r.max_over("omega1-2.unitary_invariance", cfg.samples, 1e-10, |rng| {
        let (z, w) = pair(rng)?;
        let rot = Omega1Isometry::rotation(sample_unitary(rng, M), sample_unitary(rng, M))?;
        let d = omega1_diastasis(&z, &w)?;
        Ok((omega1_diastasis(&rot.apply(&z)?, &rot.apply(&w)?)? - d).abs() / d.max(1.0))
    })?;
    r.max_over("omega1-2.mobius_invariance", cfg.samples, 1e-10, |rng| {
        let (z1, z2) = pair(rng)?;
        let center = sample_omega1(rng, M, rmax)?;
        let g = Omega1Isometry::with_rotation(&center, sample_unitary(rng, M), sample_unitary(rng, M))?;
        let d = omega1_diastasis(&z1, &z2)?;
        Ok((omega1_diastasis(&g.apply(&z1)?, &g.apply(&z2)?)? - d).abs() / d.max(1.0))
    })?;
    r.max_over("omega1-2.mobius_round_trip", cfg.samples, 1e-10, |rng| {
        let (z, w) = pair(rng)?;
        let g = Omega1Isometry::with_rotation(&w, sample_unitary(rng, M), sample_unitary(rng, M))?;
        Ok((g.inverse_apply(&g.apply(&z)?)?.to_real() - z.to_real()).amax())
    })?;
    let bound = 2.0 * ((M * M) as f64).sqrt();
    r.max_over("omega1-2.gradient_below_2sqrt_dim", cfg.samples, 0.0, |rng| {
        let (z, w) = pair(rng)?;
        let norm = omega1_grad_diastasis(&w, &z)?.norm_in(&omega1_metric(&z));
        Ok((norm - (bound - MARGIN)).max(0.0))
    })?;
    let largest = {
        let mut rng = r.rng();
        let mut top = 0.0f64;
        for _ in 0..cfg.samples.min(200) {
            let (z, w) = pair(&mut rng)?;
            top = top.max(omega1_grad_diastasis(&w, &z)?.norm_in(&omega1_metric(&z)));
        }
        top
    };
    r.observe("omega1-2.largest_gradient_norm", largest);
    r.max_over("omega1-2.hessian_band", cfg.samples, 0.0, |rng| {
        let (z, w) = pair(rng)?;
        let ev = omega1_hessian_diastasis(&w, &z)?.relative_eigenvalues(&omega1_metric(&z))?;
        Ok((MARGIN - ev[0]).max(ev[ev.len() - 1] - (4.0 - MARGIN)).max(0.0))
    })?;

    let fd_rmax = cfg.fd_rmax;
    r.max_over("omega1-2.gradient_vs_fd", cfg.fd_samples, 1e-5, |rng| {
        let z = sample_omega1(rng, M, fd_rmax)?;
        let w = sample_omega1(rng, M, fd_rmax)?;
        let dz = fd_gradient(|v| omega1_diastasis(&from_real(v)?, &w), &z.to_real(), DEFAULT_GRADIENT_STEP)?;
        let raised = omega1_metric(&z).into_matrix().lu().solve(&dz).expect("metric is invertible");
        let exact = omega1_grad_diastasis(&w, &z)?.into_entries();
        Ok((raised - &exact).amax() / exact.amax().max(1.0))
    })?;
    r.max_over("omega1-2.hessian_vs_fd", cfg.fd_samples, 1e-3, |rng| {
        let z = sample_omega1(rng, M, fd_rmax)?;
        let w = sample_omega1(rng, M, fd_rmax)?;
        let fd = fd_covariant_hessian(
            |v| omega1_diastasis(&from_real(v)?, &w),
            |v| Ok(omega1_metric(&from_real(v)?)),
            &z.to_real(),
            DEFAULT_HESSIAN_STEP,
        )?;
        Ok(rel_err(fd.matrix(), omega1_hessian_diastasis(&w, &z)?.matrix(), 1.0))
    })?;
    let origin = DomainMatrixPoint::zero(M);
    r.max_over("omega1-2.diagonal_gradient_vs_fd", cfg.fd_samples, 1e-5, |rng| {
        let (diag, z) = diagonal_point(rng, fd_rmax)?;
        let dz = fd_gradient(|v| omega1_diastasis(&from_real(v)?, &origin), &z.to_real(), DEFAULT_GRADIENT_STEP)?;
        let raised = omega1_metric(&z).into_matrix().lu().solve(&dz).expect("metric is invertible");
        let exact = diagonal_gradient(&diag);
        Ok((raised - &exact).amax() / exact.amax().max(1.0))
    })?;
    r.max_over("omega1-2.diagonal_hessian_vs_fd", cfg.fd_samples, 1e-3, |rng| {
        let (diag, z) = diagonal_point(rng, fd_rmax)?;
        let fd = fd_covariant_hessian(
            |v| omega1_diastasis(&from_real(v)?, &origin),
            |v| Ok(omega1_metric(&from_real(v)?)),
            &z.to_real(),
            DEFAULT_HESSIAN_STEP,
        )?;
        Ok(rel_err(fd.matrix(), diagonal_hessian(&diag).matrix(), 1.0))
    })?;

    let hereditary_samples = cfg.samples.min(500);
    for (label, e) in [
        ("ball2_first_row", Embedding::ball_first_row(2)?),
        ("polydisc2_diagonal", Embedding::polydisc_diagonal(2)?),
    ] {
        let seed = r.rng();
        let seed = rand::Rng::random::<u64>(&mut { seed });
        let rep = verify_hereditary(&e, hereditary_samples, seed, rmax)?;
        r.record(format!("hereditary.{label}.diastasis"), rep.samples, rep.diastasis_deviation, 1e-10);
        r.record(format!("hereditary.{label}.gradient"), rep.samples, rep.gradient_deviation, 1e-6);
        r.record(format!("hereditary.{label}.hessian"), rep.samples, rep.hessian_deviation, 1e-6);
    }
    Ok(())
}
