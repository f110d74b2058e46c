use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ball::{self, BallPoint, MobiusIsometry};
use crate::barycentre::{
    discrete_f, homotopy_path, jacobian_f, solve_barycentre, BarycentreProblem, DiscreteBarycentreMap,
    DiscreteMeasure, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use crate::error::Result;
use crate::numerics::{fd_jacobian, sample_ball, sample_unitary};

use super::Runner;

pub(super) fn random_problem(rng: &mut ChaCha8Rng, n: usize, max_atoms: usize, rmax: f64) -> Result<BarycentreProblem> {
    let k = rng.random_range(1..=max_atoms);
    let atoms = (0..k)
        .map(|_| Ok((sample_ball(rng, n, rmax)?, rng.random_range(0.1..2.0))))
        .collect::<Result<Vec<_>>>()?;
    let measure = DiscreteMeasure::new(atoms)?;
    let images = (0..k).map(|_| sample_ball(rng, n, rmax)).collect::<Result<Vec<_>>>()?;
    let t = if rng.random_bool(0.5) { 1.0 } else { rng.random::<f64>() };
    BarycentreProblem::new(measure, images, t, sample_ball(rng, n, rmax)?)
}

pub(super) fn random_map(rng: &mut ChaCha8Rng, n: usize, atoms: usize, c: f64, with_f: bool) -> Result<DiscreteBarycentreMap> {
    let cloud = (0..atoms)
        .map(|_| Ok((sample_ball(rng, n, 0.8)?, rng.random_range(0.5..1.5))))
        .collect::<Result<Vec<_>>>()?;
    let f = if with_f { Some(random_mobius(rng, n, 0.5)?) } else { None };
    DiscreteBarycentreMap::new(DiscreteMeasure::new(cloud)?, f, c)
}

pub(super) fn random_mobius(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> Result<MobiusIsometry> {
    MobiusIsometry::with_unitary(sample_ball(rng, n, rmax)?, sample_unitary(rng, n))
}

pub(super) fn run(r: &mut Runner) -> Result<()> {
    let cfg = *r.config();
    let problems = cfg.problems.max(1);
    let rmax = cfg.rmax;
    for n in [1usize, 2] {
        r.max_over(format!("ball{n}.solver_residual"), problems, DEFAULT_TOL, |rng| {
            let p = random_problem(rng, n, 50, rmax)?;
            let sol = solve_barycentre(&p, DEFAULT_TOL, DEFAULT_MAX_ITERS)?;
            // recomputed from scratch rather than trusted from the solver
            p.residual(&sol.point)
        })?;
        r.max_over(format!("ball{n}.solver_convexity"), problems, 0.0, |rng| {
            let p = random_problem(rng, n, 50, rmax)?;
            let sol = solve_barycentre(&p, DEFAULT_TOL, DEFAULT_MAX_ITERS)?;
            Ok(if sol.min_hessian_eigenvalue > 0.0 { 0.0 } else { 1.0 })
        })?;
        r.max_over(format!("ball{n}.dirac"), problems, 1e-12, |rng| {
            let p = sample_ball(rng, n, rmax)?;
            let m = DiscreteMeasure::new(vec![(sample_ball(rng, n, rmax)?, rng.random_range(0.1..2.0))])?;
            let prob = BarycentreProblem::new(m, vec![p.clone()], 1.0, BallPoint::origin(n))?;
            let x = solve_barycentre(&prob, DEFAULT_TOL, DEFAULT_MAX_ITERS)?.point;
            Ok((x.to_real() - p.to_real()).amax())
        })?;
        r.max_over(format!("ball{n}.symmetric_pair"), problems, 1e-12, |rng| {
            let a = sample_ball(rng, n, rmax)?;
            let b = BallPoint::new(a.coords().iter().map(|c| -c).collect())?;
            let x = solve_barycentre(&BarycentreProblem::plain(DiscreteMeasure::uniform(vec![a, b])?), DEFAULT_TOL, DEFAULT_MAX_ITERS)?.point;
            Ok(x.norm())
        })?;
        r.max_over(format!("ball{n}.homotopy_t0_anchor"), problems, 0.0, |rng| {
            let p = random_problem(rng, n, 10, rmax)?.with_t(0.0)?;
            let x = solve_barycentre(&p, DEFAULT_TOL, DEFAULT_MAX_ITERS)?.point;
            Ok((x.to_real() - p.anchor().to_real()).amax())
        })?;
    }

    let mut rng = r.rng();
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let mut lipschitz = 0.0f64;
    for _ in 0..cfg.problems.min(20) {
        let p = random_problem(&mut rng, 2, 10, rmax)?;
        let path = homotopy_path(&p, &grid, DEFAULT_TOL, DEFAULT_MAX_ITERS)?;
        for w in path.windows(2) {
            lipschitz = lipschitz.max(ball::distance(&w[0], &w[1])? / 0.1);
        }
    }
    r.observe("ball2.homotopy_lipschitz", lipschitz);

    let equivariance = cfg.problems.min(100);
    r.max_over("ball2.equivariance", equivariance, 1e-7, |rng| {
        let map = random_map(rng, 2, 8, 3.0, false)?;
        let gamma = random_mobius(rng, 2, 0.6)?;
        let y = sample_ball(rng, 2, 0.6)?;
        let moved = map
            .cloud()
            .iter()
            .zip(map.base_weights())
            .map(|(z, v)| Ok((gamma.apply(z)?, *v)))
            .collect::<Result<Vec<_>>>()?;
        let moved = DiscreteBarycentreMap::new(DiscreteMeasure::new(moved)?, None, map.c())?;
        let lhs = discrete_f(&moved, &gamma.apply(&y)?)?;
        let rhs = gamma.apply(&discrete_f(&map, &y)?)?;
        ball::distance(&lhs, &rhs)
    })?;

    for n in [1usize, 2] {
        r.max_over(format!("ball{n}.jacobian_vs_fd"), cfg.problems.min(50), 1e-4, |rng| {
            let map = random_map(rng, n, 2 * n + 4, n as f64 + 1.0, true)?;
            let y = sample_ball(rng, n, 0.5)?;
            let x = discrete_f(&map, &y)?;
            let jac = jacobian_f(&map, &y, &x)?;
            let fd = fd_jacobian(
                |v: &DVector<f64>| Ok(discrete_f(&map, &BallPoint::from_real(v.as_slice())?)?.to_real()),
                &y.to_real(),
                1e-5,
            )?;
            Ok((&jac - fd).norm() / jac.norm().max(1e-12))
        })?;
    }
    r.max_over("ball1.dirac_map_is_constant", 20, 1e-12, |rng| {
        let z = sample_ball(rng, 1, 0.8)?;
        let map = DiscreteBarycentreMap::new(DiscreteMeasure::uniform(vec![z.clone()])?, None, 2.0)?;
        let y = BallPoint::new(vec![Complex64::new(rng.random_range(-0.5..0.5), 0.0)])?;
        let x = discrete_f(&map, &y)?;
        Ok(((x.to_real() - z.to_real()).amax()).max(jacobian_f(&map, &y, &x)?.amax()))
    })?;
    Ok(())
}
