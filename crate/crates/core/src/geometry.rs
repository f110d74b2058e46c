use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use nalgebra::DVector;

use crate::ball::{self, BallPoint};
use crate::domains::{self, DomainMatrixPoint, PolydiscPoint};
use crate::error::{Error, Result};
use crate::numerics::{RealForm, TangentVector};

/// Which model space, with its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// Complex hyperbolic space `CH^n` as the unit ball of `C^n`.
    Ball { n: usize },
    /// Product of `r` unit discs.
    Polydisc { r: usize },
    /// The matrix ball `Omega_1[m, m]`.
    Omega1 { m: usize },
}

impl Geometry {
    pub fn complex_dimension(&self) -> usize {
        match *self {
            Geometry::Ball { n } => n,
            Geometry::Polydisc { r } => r,
            Geometry::Omega1 { m } => m * m,
        }
    }

    pub fn real_dimension(&self) -> usize {
        2 * self.complex_dimension()
    }

    pub fn rank(&self) -> usize {
        match *self {
            Geometry::Ball { .. } => 1,
            Geometry::Polydisc { r } => r,
            Geometry::Omega1 { m } => m,
        }
    }

    /// Supremum of the metric norm of the diastasis gradient: `2 sqrt(rank)`.
    pub fn x_constant(&self) -> f64 {
        2.0 * (self.rank() as f64).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if self.complex_dimension() == 0 {
            Err(Error::InvalidArgument(format!("{self} has zero dimension")))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Geometry::Ball { n } => write!(f, "ball{n}"),
            Geometry::Polydisc { r } => write!(f, "polydisc{r}"),
            Geometry::Omega1 { m } => write!(f, "omega1-{m}"),
        }
    }
}

/// Parses `ball<n>`, `polydisc<r>` and `omega1-<m>`.
impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |digits: &str| -> Result<usize> {
            digits
                .parse::<usize>()
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::InvalidArgument(format!("bad dimension in space '{s}'")))
        };
        if let Some(rest) = s.strip_prefix("omega1-") {
            Ok(Geometry::Omega1 { m: parse(rest)? })
        } else if let Some(rest) = s.strip_prefix("polydisc") {
            Ok(Geometry::Polydisc { r: parse(rest)? })
        } else if let Some(rest) = s.strip_prefix("ball") {
            Ok(Geometry::Ball { n: parse(rest)? })
        } else {
            Err(Error::InvalidArgument(format!(
                "unknown space '{s}' (expected ball<n>, polydisc<r> or omega1-<m>)"
            )))
        }
    }
}

/// A point of one of the model domains.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometryPoint {
    Ball(BallPoint),
    Polydisc(PolydiscPoint),
    Omega1(DomainMatrixPoint),
}

impl GeometryPoint {
    pub fn geometry(&self) -> Geometry {
        match self {
            GeometryPoint::Ball(p) => Geometry::Ball { n: p.dim() },
            GeometryPoint::Polydisc(p) => Geometry::Polydisc { r: p.rank() },
            GeometryPoint::Omega1(p) => Geometry::Omega1 { m: p.size() },
        }
    }

    /// Euclidean norm for balls, largest modulus for polydiscs, operator norm for matrices.
    pub fn radius(&self) -> f64 {
        match self {
            GeometryPoint::Ball(p) => p.norm(),
            GeometryPoint::Polydisc(p) => p.coords().iter().map(|c| c.norm()).fold(0.0, f64::max),
            GeometryPoint::Omega1(p) => p.spectral_norm(),
        }
    }

    pub fn to_real(&self) -> DVector<f64> {
        match self {
            GeometryPoint::Ball(p) => p.to_real(),
            GeometryPoint::Polydisc(p) => p.to_real(),
            GeometryPoint::Omega1(p) => p.to_real(),
        }
    }

    /// Point of `geometry` with the given real chart coordinates.
    pub fn from_real(geometry: Geometry, x: &[f64]) -> Result<Self> {
        if x.len() != geometry.real_dimension() {
            return Err(Error::Dimension {
                expected: geometry.real_dimension(),
                got: x.len(),
            });
        }
        Ok(match geometry {
            Geometry::Ball { .. } => GeometryPoint::Ball(BallPoint::from_real(x)?),
            Geometry::Polydisc { .. } => GeometryPoint::Polydisc(PolydiscPoint::from_real(x)?),
            Geometry::Omega1 { m } => GeometryPoint::Omega1(DomainMatrixPoint::from_real(x, m)?),
        })
    }
}

fn mismatch(a: &GeometryPoint, b: &GeometryPoint) -> Error {
    Error::InvalidArgument(format!(
        "points live in different spaces ({} and {})",
        a.geometry(),
        b.geometry()
    ))
}

/// Diastasis between two points of the same space.
pub fn diastasis(p: &GeometryPoint, q: &GeometryPoint) -> Result<f64> {
    match (p, q) {
        (GeometryPoint::Ball(a), GeometryPoint::Ball(b)) => ball::diastasis(a, b),
        (GeometryPoint::Polydisc(a), GeometryPoint::Polydisc(b)) => domains::polydisc_diastasis(a, b),
        (GeometryPoint::Omega1(a), GeometryPoint::Omega1(b)) => domains::omega1_diastasis(b, a),
        _ => Err(mismatch(p, q)),
    }
}

pub fn distance(p: &GeometryPoint, q: &GeometryPoint) -> Result<f64> {
    match (p, q) {
        (GeometryPoint::Ball(a), GeometryPoint::Ball(b)) => ball::distance(a, b),
        (GeometryPoint::Polydisc(a), GeometryPoint::Polydisc(b)) => domains::polydisc_distance(a, b),
        (GeometryPoint::Omega1(a), GeometryPoint::Omega1(b)) => domains::omega1_distance(a, b),
        _ => Err(mismatch(p, q)),
    }
}

pub fn metric(p: &GeometryPoint) -> RealForm {
    match p {
        GeometryPoint::Ball(a) => ball::metric_matrix(a),
        GeometryPoint::Polydisc(a) => domains::polydisc_metric(a),
        GeometryPoint::Omega1(a) => domains::omega1_metric(a),
    }
}

/// Riemannian gradient of `D_center` at `at`.
pub fn grad_diastasis(center: &GeometryPoint, at: &GeometryPoint) -> Result<TangentVector> {
    match (center, at) {
        (GeometryPoint::Ball(w), GeometryPoint::Ball(x)) => ball::grad_diastasis(w, x),
        (GeometryPoint::Polydisc(w), GeometryPoint::Polydisc(x)) => domains::polydisc_grad_diastasis(w, x),
        (GeometryPoint::Omega1(w), GeometryPoint::Omega1(x)) => domains::omega1_grad_diastasis(w, x),
        _ => Err(mismatch(center, at)),
    }
}

/// Covariant Hessian of `D_center` at `at`.
pub fn hessian_diastasis(center: &GeometryPoint, at: &GeometryPoint) -> Result<RealForm> {
    match (center, at) {
        (GeometryPoint::Ball(w), GeometryPoint::Ball(x)) => ball::hessian_diastasis(w, x),
        (GeometryPoint::Polydisc(w), GeometryPoint::Polydisc(x)) => domains::polydisc_hessian_diastasis(w, x),
        (GeometryPoint::Omega1(w), GeometryPoint::Omega1(x)) => domains::omega1_hessian_diastasis(w, x),
        _ => Err(mismatch(center, at)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for g in [
            Geometry::Ball { n: 2 },
            Geometry::Polydisc { r: 3 },
            Geometry::Omega1 { m: 2 },
        ] {
            assert_eq!(g.to_string().parse::<Geometry>().unwrap(), g);
        }
        assert!("ball0".parse::<Geometry>().is_err());
        assert!("sphere2".parse::<Geometry>().is_err());
    }

    #[test]
    fn x_constants() {
        assert_eq!(Geometry::Ball { n: 4 }.x_constant(), 2.0);
        assert!((Geometry::Polydisc { r: 2 }.x_constant() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Geometry::Omega1 { m: 3 }.complex_dimension(), 9);
    }
}
