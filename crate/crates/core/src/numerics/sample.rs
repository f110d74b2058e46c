//! Seeded samplers for the model domains.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ball::BallPoint;
use crate::domains::{DomainMatrixPoint, PolydiscPoint};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryPoint};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent deterministic stream `stream` under `seed`; used to give every
/// sample of a batch its own generator so batches can run in parallel.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_rmax(rmax: f64) -> Result<()> {
    if rmax > 0.0 && rmax < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("rmax must lie in (0, 1), got {rmax}")))
    }
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniform point of the Euclidean ball of radius `rmax` in `C^n`.
pub fn sample_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, rmax: f64) -> Result<BallPoint> {
    check_rmax(rmax)?;
    if n == 0 {
        return Err(Error::InvalidArgument("ball dimension must be at least 1".into()));
    }
    loop {
        let dir: Vec<Complex64> = (0..n).map(|_| gaussian_complex(rng)).collect();
        let norm = dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let radius = rmax * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
        let z = dir.into_iter().map(|c| c * (radius / norm)).collect();
        if let Ok(p) = BallPoint::new(z) {
            return Ok(p);
        }
    }
}

/// Each coordinate uniform in the disc of radius `rmax`.
pub fn sample_polydisc<R: Rng + ?Sized>(rng: &mut R, r: usize, rmax: f64) -> Result<PolydiscPoint> {
    check_rmax(rmax)?;
    if r == 0 {
        return Err(Error::InvalidArgument("polydisc rank must be at least 1".into()));
    }
    let z = (0..r)
        .map(|_| {
            let radius = rmax * rng.random::<f64>().sqrt();
            let angle = std::f64::consts::TAU * rng.random::<f64>();
            Complex64::from_polar(radius, angle)
        })
        .collect();
    PolydiscPoint::new(z)
}

/// Point of `Omega_1[m, m]` with operator norm at most `rmax`: a Gaussian matrix
/// rescaled to a spectral radius drawn uniformly in volume.
pub fn sample_omega1<R: Rng + ?Sized>(rng: &mut R, m: usize, rmax: f64) -> Result<DomainMatrixPoint> {
    check_rmax(rmax)?;
    if m == 0 {
        return Err(Error::InvalidArgument("matrix size must be at least 1".into()));
    }
    loop {
        let g = DMatrix::from_fn(m, m, |_, _| gaussian_complex(rng));
        let top = g.clone().singular_values().max();
        if top == 0.0 {
            continue;
        }
        let radius = rmax * rng.random::<f64>().powf(1.0 / (2 * m * m) as f64);
        let z = g * Complex64::new(radius / top, 0.0);
        if let Ok(p) = DomainMatrixPoint::new(z) {
            return Ok(p);
        }
    }
}

/// Unitary `n x n` matrix: the `Q` factor of a complex Gaussian matrix.
pub fn sample_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| gaussian_complex(rng)).qr().q()
}

pub fn sample_point<R: Rng + ?Sized>(rng: &mut R, geometry: Geometry, rmax: f64) -> Result<GeometryPoint> {
    Ok(match geometry {
        Geometry::Ball { n } => GeometryPoint::Ball(sample_ball(rng, n, rmax)?),
        Geometry::Polydisc { r } => GeometryPoint::Polydisc(sample_polydisc(rng, r, rmax)?),
        Geometry::Omega1 { m } => GeometryPoint::Omega1(sample_omega1(rng, m, rmax)?),
    })
}

pub fn sample_point_seeded(seed: u64, geometry: Geometry, rmax: f64) -> Result<GeometryPoint> {
    sample_point(&mut seeded_rng(seed), geometry, rmax)
}
