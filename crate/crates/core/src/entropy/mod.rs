//! Finiteness probes for `∫ e^{-c D_0} dν` and the critical exponent.
//!
//! The integrand depends only on the radius, so the volume integral reduces to
//! a one-dimensional integral (angular factors dropped). It is evaluated on
//! dyadic shells `t = 1 - r ∈ [2^{-k}, 2^{-k+1}]`, giving partial values `I_k`
//! up to radius `R_k = 1 - 2^{-k}`; the verdict reads the tail increments.

mod quadrature;

pub use quadrature::integrate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Geometry;

const SHELL_TOL: f64 = 1e-13;
/// Windows tried by [`critical_exponent`] before an undecided probe is
/// counted as divergent.
const ESCALATION: [usize; 4] = [5, 10, 20, 40];
/// Deepest level; `2^{-52}` is the spacing of doubles near one.
const MAX_LEVELS: usize = 52;
/// Smallest exponent tried as the divergent end of the bracket.
const LOWEST_EXPONENT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Number of dyadic shells.
    pub levels: usize,
    /// Increments compared are `window` levels apart.
    pub window: usize,
    /// Convergent when the last increment is at most `ratio` times the one
    /// `window` levels earlier.
    pub ratio: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            levels: 30,
            window: 5,
            ratio: 0.75,
        }
    }
}

impl ProbeConfig {
    fn validate(&self) -> Result<()> {
        if self.levels < 8 || self.levels > MAX_LEVELS {
            return Err(Error::InvalidArgument(format!("levels must lie in [8, {MAX_LEVELS}], got {}", self.levels)));
        }
        if self.window == 0 || self.window >= self.levels {
            return Err(Error::InvalidArgument(format!("window must lie in [1, levels), got {}", self.window)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidArgument(format!("ratio must lie in (0, 1), got {}", self.ratio)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Convergent,
    Divergent,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub c: f64,
    /// Truncation radii `R_k`.
    pub radii: Vec<f64>,
    /// Partial values `I_k`, nondecreasing.
    pub partial: Vec<f64>,
    pub verdict: Verdict,
    pub config: ProbeConfig,
}

fn check_exponent(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exponent must be positive, got {c}")))
    }
}

/// Radial integrand in `t = 1 - r` for a ball of complex dimension `n`:
/// `(1 - r^2)^{c-n-1} r^{2n-1}`, optionally times `arctanh r`.
fn shell_integrals(n: usize, c: f64, levels: usize, with_distance: bool) -> Vec<f64> {
    let e = c - n as f64 - 1.0;
    let f = move |t: f64| {
        let r = 1.0 - t;
        let base = (t * (2.0 - t)).powf(e) * r.powi(2 * n as i32 - 1);
        if with_distance {
            base * 0.5 * ((2.0 - t) / t).ln()
        } else {
            base
        }
    };
    (1..=levels)
        .map(|k| {
            let lo = 0.5f64.powi(k as i32);
            integrate(f, lo, 2.0 * lo, SHELL_TOL)
        })
        .collect()
}

fn cumulative(shells: &[f64]) -> Vec<f64> {
    shells
        .iter()
        .scan(0.0, |acc, s| {
            *acc += s;
            Some(*acc)
        })
        .collect()
}

fn judge(partial: &[f64], cfg: &ProbeConfig) -> Verdict {
    let mut inc = Vec::with_capacity(partial.len());
    let mut prev = 0.0;
    for &p in partial {
        inc.push(p - prev);
        prev = p;
    }
    let last = inc.len() - 1;
    let tail = &inc[last - cfg.window..];
    if inc[last] <= cfg.ratio * inc[last - cfg.window] {
        Verdict::Convergent
    } else if tail.windows(2).all(|w| w[1] >= w[0]) {
        Verdict::Divergent
    } else {
        Verdict::Undecided
    }
}

fn radii(levels: usize) -> Vec<f64> {
    (1..=levels).map(|k| 1.0 - 0.5f64.powi(k as i32)).collect()
}

/// Partial values of `∫ e^{-c D_0} dν` over balls (or polydiscs) of radius `R_k`.
pub fn radial_probe(geometry: Geometry, c: f64, config: &ProbeConfig) -> Result<ProbeResult> {
    check_exponent(c)?;
    config.validate()?;
    let partial = match geometry {
        Geometry::Ball { n } => cumulative(&shell_integrals(n, c, config.levels, false)),
        Geometry::Polydisc { r } => cumulative(&shell_integrals(1, c, config.levels, false))
            .into_iter()
            .map(|v| v.powi(r as i32))
            .collect(),
        Geometry::Omega1 { .. } => {
            return Err(Error::InvalidArgument("entropy probes cover balls and polydiscs only".into()));
        }
    };
    geometry.validate()?;
    Ok(ProbeResult {
        c,
        radii: radii(config.levels),
        verdict: judge(&partial, config),
        partial,
        config: *config,
    })
}

/// Same probe for `∫ rho(0, q) e^{-c D_0(q)} dν(q)` on the ball.
pub fn condition_a_probe(geometry: Geometry, c: f64, config: &ProbeConfig) -> Result<ProbeResult> {
    check_exponent(c)?;
    config.validate()?;
    let Geometry::Ball { n } = geometry else {
        return Err(Error::InvalidArgument("condition (a) probe is implemented for balls only".into()));
    };
    geometry.validate()?;
    let partial = cumulative(&shell_integrals(n, c, config.levels, true));
    Ok(ProbeResult {
        c,
        radii: radii(config.levels),
        verdict: judge(&partial, config),
        partial,
        config: *config,
    })
}

/// Verdict at `c`, widening the window while the probe stays undecided.
fn escalated_verdict(geometry: Geometry, c: f64, base: &ProbeConfig) -> Result<Verdict> {
    let mut verdict = Verdict::Undecided;
    for &w in ESCALATION.iter().filter(|&&w| w >= base.window) {
        let cfg = ProbeConfig {
            window: w,
            levels: base.levels.max(w + 10).min(MAX_LEVELS),
            ratio: base.ratio,
        };
        if cfg.window >= cfg.levels {
            break;
        }
        verdict = radial_probe(geometry, c, &cfg)?.verdict;
        if verdict != Verdict::Undecided {
            break;
        }
    }
    Ok(verdict)
}

/// Bisection for the exponent where the integral becomes finite.
pub fn critical_exponent(geometry: Geometry, tol: f64) -> Result<f64> {
    critical_exponent_with(geometry, tol, &ProbeConfig::default())
}

pub fn critical_exponent_with(geometry: Geometry, tol: f64, config: &ProbeConfig) -> Result<f64> {
    if !(tol >= 1e-3) {
        return Err(Error::InvalidArgument(format!("tolerance must be at least 1e-3, got {tol}")));
    }
    geometry.validate()?;
    config.validate()?;
    let upper = 10.0 * geometry.complex_dimension() as f64;
    let mut lo = LOWEST_EXPONENT;
    let mut hi = upper;
    if escalated_verdict(geometry, lo, config)? != Verdict::Divergent
        || escalated_verdict(geometry, hi, config)? != Verdict::Convergent
    {
        return Err(Error::BracketNotFound { upper });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match escalated_verdict(geometry, mid, config)? {
            Verdict::Convergent => hi = mid,
            // undecided means the tail decays too slowly to tell: keep the
            // convergent end trusted and move the divergent end up
            Verdict::Divergent | Verdict::Undecided => lo = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `X(g) * critical_exponent`.
pub fn diastatic_entropy(geometry: Geometry, tol: f64) -> Result<f64> {
    Ok(geometry.x_constant() * critical_exponent(geometry, tol)?)
}
