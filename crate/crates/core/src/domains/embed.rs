use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Geometry, GeometryPoint};
use crate::numerics::{orthonormal_frame, sample_point, stream_rng};

use super::omega1::DomainMatrixPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    /// `CH^n` as the matrices of `Omega_1[n, n]` supported on the first row.
    BallFirstRow,
    /// The polydisc as the diagonal matrices of `Omega_1[r, r]`.
    PolydiscDiagonal,
}

/// Holomorphic totally geodesic embedding into `Omega_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    kind: EmbeddingKind,
    source: Geometry,
    target: Geometry,
}

impl Embedding {
    pub fn ball_first_row(n: usize) -> Result<Self> {
        let source = Geometry::Ball { n };
        source.validate()?;
        Ok(Self {
            kind: EmbeddingKind::BallFirstRow,
            source,
            target: Geometry::Omega1 { m: n },
        })
    }

    pub fn polydisc_diagonal(r: usize) -> Result<Self> {
        let source = Geometry::Polydisc { r };
        source.validate()?;
        Ok(Self {
            kind: EmbeddingKind::PolydiscDiagonal,
            source,
            target: Geometry::Omega1 { m: r },
        })
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn source(&self) -> Geometry {
        self.source
    }

    pub fn target(&self) -> Geometry {
        self.target
    }

    fn size(&self) -> usize {
        self.target.rank()
    }

    /// Real index in the target chart of the `k`-th complex source coordinate.
    fn slot(&self, k: usize) -> usize {
        let m = self.size();
        match self.kind {
            EmbeddingKind::BallFirstRow => k,
            EmbeddingKind::PolydiscDiagonal => k * m + k,
        }
    }

    pub fn embed(&self, p: &GeometryPoint) -> Result<GeometryPoint> {
        if p.geometry() != self.source {
            return Err(Error::InvalidArgument(format!(
                "embedding expects a point of {}, got {}",
                self.source,
                p.geometry()
            )));
        }
        let m = self.size();
        let mut z = DMatrix::zeros(m, m);
        let coords = match p {
            GeometryPoint::Ball(b) => b.coords(),
            GeometryPoint::Polydisc(d) => d.coords(),
            GeometryPoint::Omega1(_) => unreachable!("source is never a matrix ball"),
        };
        for (k, c) in coords.iter().enumerate() {
            let s = self.slot(k);
            z[(s / m, s % m)] = *c;
        }
        Ok(GeometryPoint::Omega1(DomainMatrixPoint::new(z)?))
    }

    /// Real differential of the (linear) embedding.
    pub fn pushforward(&self) -> DMatrix<f64> {
        let src = self.source.real_dimension();
        let mut p = DMatrix::zeros(self.target.real_dimension(), src);
        for k in 0..src / 2 {
            let s = 2 * self.slot(k);
            p[(s, 2 * k)] = 1.0;
            p[(s + 1, 2 * k + 1)] = 1.0;
        }
        p
    }
}

/// Largest deviations from the hereditary identities over a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HereditaryReport {
    pub embedding: Embedding,
    pub samples: usize,
    /// `|D_src(p, q) - D_tgt(psi p, psi q)|`.
    pub diastasis_deviation: f64,
    /// Target-metric norm of `psi_* grad_src - pi grad_tgt`.
    pub gradient_deviation: f64,
    /// Largest entry of `P^T Hess_tgt P - Hess_src` in a source orthonormal frame.
    pub hessian_deviation: f64,
}

fn pair_deviation(e: &Embedding, p: &GeometryPoint, q: &GeometryPoint) -> Result<[f64; 3]> {
    let (pt, qt) = (e.embed(p)?, e.embed(q)?);
    let dd = (geometry::diastasis(p, q)? - geometry::diastasis(&pt, &qt)?).abs();

    let push = e.pushforward();
    let g_tgt = geometry::metric(&qt).into_matrix();
    let grad_src = push.clone() * geometry::grad_diastasis(p, q)?.into_entries();
    let grad_tgt = geometry::grad_diastasis(&pt, &qt)?.into_entries();
    let gram = push.transpose() * &g_tgt * &push;
    let coeffs = gram
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("pulled-back metric is not positive definite".into()))?
        .solve(&(push.transpose() * &g_tgt * &grad_tgt));
    let diff = grad_src - &push * coeffs;
    let dg = (diff.transpose() * &g_tgt * &diff)[(0, 0)].max(0.0).sqrt();

    let h_src = geometry::hessian_diastasis(p, q)?.into_matrix();
    let h_tgt = geometry::hessian_diastasis(&pt, &qt)?.into_matrix();
    let frame = orthonormal_frame(geometry::metric(q).matrix())?;
    let dh = (&frame * (push.transpose() * h_tgt * &push - h_src) * &frame).amax();
    Ok([dd, dg, dh])
}

/// Checks that diastasis, gradient and Hessian of the source agree with those
/// of the target along the embedding, on `samples` seeded pairs of radius at
/// most `rmax`.
pub fn verify_hereditary(embedding: &Embedding, samples: usize, seed: u64, rmax: f64) -> Result<HereditaryReport> {
    let devs = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let p = sample_point(&mut rng, embedding.source, rmax)?;
            let q = sample_point(&mut rng, embedding.source, rmax)?;
            pair_deviation(embedding, &p, &q)
        })
        .collect::<Result<Vec<_>>>()?;
    let max = |k: usize| devs.iter().map(|d| d[k]).fold(0.0, f64::max);
    Ok(HereditaryReport {
        embedding: *embedding,
        samples,
        diastasis_deviation: max(0),
        gradient_deviation: max(1),
        hessian_deviation: max(2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::BallPoint;
    use crate::domains::PolydiscPoint;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ball_goes_to_first_row() {
        let e = Embedding::ball_first_row(2).unwrap();
        let p = GeometryPoint::Ball(BallPoint::new(vec![c(0.3, 0.0), c(0.0, 0.4)]).unwrap());
        let GeometryPoint::Omega1(z) = e.embed(&p).unwrap() else { panic!() };
        assert_eq!(z.matrix()[(0, 0)], c(0.3, 0.0));
        assert_eq!(z.matrix()[(0, 1)], c(0.0, 0.4));
        assert_eq!(z.matrix()[(1, 0)], c(0.0, 0.0));
        assert_eq!(z.matrix()[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn polydisc_goes_to_diagonal() {
        let e = Embedding::polydisc_diagonal(2).unwrap();
        let p = GeometryPoint::Polydisc(PolydiscPoint::new(vec![c(0.5, 0.0), c(-0.2, 0.0)]).unwrap());
        let GeometryPoint::Omega1(z) = e.embed(&p).unwrap() else { panic!() };
        assert_eq!(*z.matrix(), DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]));
        let o = GeometryPoint::Polydisc(PolydiscPoint::origin(2));
        assert_eq!(e.embed(&o).unwrap().radius(), 0.0);
    }

    #[test]
    fn pushforward_matches_embedding() {
        let e = Embedding::polydisc_diagonal(3).unwrap();
        let p = GeometryPoint::Polydisc(PolydiscPoint::new(vec![c(0.1, 0.2), c(-0.3, 0.0), c(0.0, 0.5)]).unwrap());
        let image = e.embed(&p).unwrap().to_real();
        assert_eq!(e.pushforward() * p.to_real(), image);
    }

    #[test]
    fn coincident_pair_has_zero_deviation() {
        let e = Embedding::ball_first_row(2).unwrap();
        let p = GeometryPoint::Ball(BallPoint::new(vec![c(0.2, -0.1), c(0.3, 0.3)]).unwrap());
        let d = pair_deviation(&e, &p, &p).unwrap();
        assert!(d[0] < 1e-15 && d[1] < 1e-12 && d[2] < 1e-10, "{d:?}");
    }

    #[test]
    fn wrong_source_rejected() {
        let e = Embedding::ball_first_row(2).unwrap();
        let p = GeometryPoint::Ball(BallPoint::origin(3));
        assert!(e.embed(&p).is_err());
    }
}
