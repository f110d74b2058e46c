//! JSON problem files.
//!
//! ```json
//! {
//!   "atoms": [{"z": [[0.1, 0.0], [0.0, 0.2]], "w": 1.0, "image": [[0.1, 0.1], [0.0, 0.0]]}],
//!   "t": 0.5,
//!   "anchor": [[0.0, 0.0], [0.3, 0.0]],
//!   "c": 3.0
//! }
//! ```
//!
//! Complex scalars are `[re, im]` pairs. `image` defaults to `z`, `t` to 1,
//! and `anchor` is required only when `t < 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ball::BallPoint;
use crate::error::{Error, Result};

use super::{BarycentreProblem, DiscreteMeasure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub z: Vec<[f64; 2]>,
    pub w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub atoms: Vec<AtomSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

pub(crate) fn point(pairs: &[[f64; 2]]) -> Result<BallPoint> {
    BallPoint::new(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
}

pub(crate) fn pairs(p: &BallPoint) -> Vec<[f64; 2]> {
    p.coords().iter().map(|c| [c.re, c.im]).collect()
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("problem file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn to_problem(&self) -> Result<BarycentreProblem> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        let mut images = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let z = point(&a.z)?;
            images.push(match &a.image {
                Some(img) => point(img)?,
                None => z.clone(),
            });
            atoms.push((z, a.w));
        }
        let measure = DiscreteMeasure::new(atoms)?;
        let t = self.t.unwrap_or(1.0);
        let anchor = match &self.anchor {
            Some(a) => point(a)?,
            None if t < 1.0 => {
                return Err(Error::InvalidArgument("problem file needs an anchor when t < 1".into()));
            }
            None => BallPoint::origin(measure.dim()),
        };
        let problem = BarycentreProblem::new(measure, images, t, anchor)?;
        Ok(match self.c {
            Some(c) => problem.with_exponent(c),
            None => problem,
        })
    }

    pub fn from_problem(problem: &BarycentreProblem) -> Self {
        let atoms = problem
            .measure()
            .points()
            .iter()
            .zip(problem.measure().weights())
            .zip(problem.images())
            .map(|((z, w), img)| AtomSpec {
                z: pairs(z),
                w: *w,
                image: (img != z).then(|| pairs(img)),
            })
            .collect();
        Self {
            atoms,
            t: Some(problem.t()),
            anchor: Some(pairs(problem.anchor())),
            c: problem.exponent(),
        }
    }
}
