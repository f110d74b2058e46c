use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::barycentre::{discrete_f, hsuk_bound, hsuk_ratio, lemdet_check, operator_triple, DiscreteBarycentreMap};
use crate::error::Result;
use crate::numerics::{j_operator, sample_ball, ComplexStructure, RealForm};

use super::barycentre::random_map;
use super::Runner;

fn gaussian_vector(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    gaussian_vector(rng, d).normalize()
}

/// Random symmetric PSD matrix with trace in (0, 4], admissible for the ratio.
pub(super) fn random_admissible(rng: &mut ChaCha8Rng, j: &ComplexStructure) -> RealForm {
    let d = j.matrix().nrows();
    loop {
        let rank = rng.random_range(1..=d);
        let a = DMatrix::from_fn(d, rank, |_, _| rng.sample::<f64, _>(StandardNormal));
        let h = &a * a.transpose();
        let h = &h * (4.0 * rng.random::<f64>() / h.trace());
        let form = RealForm::symmetrized(h).expect("square even matrix");
        if hsuk_ratio(&form, j).is_ok() {
            return form;
        }
    }
}

/// Clip to PSD and trace at most 4.
fn project(h: DMatrix<f64>) -> DMatrix<f64> {
    let sym = (&h + h.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let vals = eig.eigenvalues.map(|v| v.max(0.0));
    let mut p = &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose();
    let tr = p.trace();
    if tr > 4.0 {
        p *= 4.0 / tr;
    }
    (&p + p.transpose()) * 0.5
}

/// Greedy random local search for a larger ratio, returning the best value.
pub(super) fn hill_climb(rng: &mut ChaCha8Rng, j: &ComplexStructure, steps: usize) -> f64 {
    let d = j.matrix().nrows();
    let mut h = random_admissible(rng, j).into_matrix();
    let mut best = hsuk_ratio(&RealForm::symmetrized(h.clone()).unwrap(), j).unwrap();
    let mut scale = 0.1;
    for _ in 0..steps {
        let e = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let cand = project(&h + (&e + e.transpose()) * (0.5 * scale));
        if let Ok(v) = hsuk_ratio(&RealForm::symmetrized(cand.clone()).unwrap(), j) {
            if v > best {
                best = v;
                h = cand;
                continue;
            }
        }
        scale = (scale * 0.98).max(1e-6);
    }
    best
}

fn instance(rng: &mut ChaCha8Rng, n: usize) -> Result<(DiscreteBarycentreMap, crate::ball::BallPoint)> {
    let c = n as f64 + rng.random_range(0.1..(n as f64));
    let with_f = rng.random_bool(0.5);
    let map = random_map(rng, n, 2 * n + 6, c, with_f)?;
    Ok((map, sample_ball(rng, n, 0.6)?))
}

pub(super) fn run(r: &mut Runner) -> Result<()> {
    let cfg = *r.config();
    let count = cfg.problems.min(50).max(1);
    for n in [1usize, 2, 3] {
        let nf = n as f64;
        let j = j_operator(n)?;
        r.max_over(format!("ball{n}.trace_k_equals_4n"), count, 1e-8, |rng| {
            let (map, y) = instance(rng, n)?;
            let ops = operator_triple(&map, &y, &discrete_f(&map, &y)?)?;
            Ok((ops.k.trace() - 4.0 * nf).abs())
        })?;
        r.max_over(format!("ball{n}.k_from_h"), count, 1e-8, |rng| {
            let (map, y) = instance(rng, n)?;
            let ops = operator_triple(&map, &y, &discrete_f(&map, &y)?)?;
            Ok((ops.k_from_h(&j) - ops.k.matrix()).amax())
        })?;
        r.max_over(format!("ball{n}.trace_h_at_most_4"), count, 0.0, |rng| {
            let (map, y) = instance(rng, n)?;
            let ops = operator_triple(&map, &y, &discrete_f(&map, &y)?)?;
            Ok((ops.h.trace() - 4.0).max(ops.h_prime.trace() - 4.0).max(0.0))
        })?;
        r.max_over(format!("ball{n}.cauchy_schwarz"), count, 1e-10, |rng| {
            let (map, y) = instance(rng, n)?;
            let ops = operator_triple(&map, &y, &discrete_f(&map, &y)?)?;
            let mut worst = 0.0f64;
            for _ in 0..1000 {
                let u = unit_vector(rng, 2 * n);
                let v = unit_vector(rng, 2 * n);
                let (lhs, rhs) = ops.cauchy_schwarz(map.c(), &u, &v);
                worst = worst.max(lhs - rhs);
            }
            Ok(worst.max(0.0))
        })?;
        r.max_over(format!("ball{n}.determinant_inequality"), count, 1e-8, |rng| {
            let (map, y) = instance(rng, n)?;
            let rep = lemdet_check(&map, &y)?;
            Ok((rep.lhs / rep.rhs - 1.0).max(0.0))
        })?;
    }

    let mut rng = r.rng();
    let mut sweep = Vec::new();
    let map0 = random_map(&mut rng, 2, 10, 2.1, false)?;
    let y0 = sample_ball(&mut rng, 2, 0.5)?;
    for c in [2.1, 2.5, 3.0, 3.5, 4.0] {
        let cloud = crate::barycentre::DiscreteMeasure::new(
            map0.cloud().iter().cloned().zip(map0.base_weights().iter().cloned()).collect(),
        )?;
        let rep = lemdet_check(&DiscreteBarycentreMap::new(cloud, None, c)?, &y0)?;
        sweep.push((c, rep.lhs / rep.rhs));
    }
    for (c, ratio) in sweep {
        r.observe(format!("ball2.lemdet_ratio_c{c}"), ratio);
    }

    let hsuk_samples = cfg.samples.max(1);
    for n in [2usize, 3] {
        let j = j_operator(n)?;
        let bound = hsuk_bound(n);
        let h = RealForm::symmetrized(DMatrix::identity(2 * n, 2 * n) * (2.0 / n as f64))?;
        r.record(format!("hsuk{n}.maximizer_value"), 1, (hsuk_ratio(&h, &j)? - bound).abs(), 1e-12);
        r.max_over(format!("hsuk{n}.random_admissible"), hsuk_samples, 0.0, |rng| {
            Ok((hsuk_ratio(&random_admissible(rng, &j), &j)? - bound).max(0.0))
        })?;
        r.max_over(format!("hsuk{n}.hill_climb"), 100, 0.0, |rng| Ok((hill_climb(rng, &j, 300) - bound).max(0.0)))?;
        let top = {
            let mut rng = r.rng();
            (0..10).map(|_| hill_climb(&mut rng, &j, 300)).fold(0.0, f64::max)
        };
        r.observe(format!("hsuk{n}.best_over_bound"), top / bound);
    }
    Ok(())
}
