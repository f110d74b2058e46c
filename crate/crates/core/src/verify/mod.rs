//! Seeded property suites and their JSON reports.

mod barycentre;
mod domains;
mod entropy;
mod hyperbolic;
mod operators;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::stream_rng;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Hyperbolic,
    Domains,
    Barycentre,
    Operators,
    Entropy,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["hyperbolic", "domains", "barycentre", "operators", "entropy", "all"];

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Hyperbolic,
                Suite::Domains,
                Suite::Barycentre,
                Suite::Operators,
                Suite::Entropy,
            ],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Suite::NAMES[i])
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hyperbolic" => Suite::Hyperbolic,
            "domains" => Suite::Domains,
            "barycentre" => Suite::Barycentre,
            "operators" => Suite::Operators,
            "entropy" => Suite::Entropy,
            "all" => Suite::All,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown suite '{s}' (expected one of {})",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Random configurations per cheap check.
    pub samples: usize,
    /// Radius bound for sampled points.
    pub rmax: f64,
    /// Radius bound for finite-difference comparisons.
    pub fd_rmax: f64,
    /// Cap on configurations for finite-difference checks.
    pub fd_samples: usize,
    /// Cap on barycentre problems per check.
    pub problems: usize,
}

impl VerifyConfig {
    pub fn with_samples(samples: usize) -> Self {
        Self {
            samples,
            rmax: 0.95,
            fd_rmax: 0.8,
            fd_samples: samples.min(500),
            problems: samples.min(100),
        }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self::with_samples(1000)
    }
}

/// One check: the worst deviation over its samples against a tolerance.
/// Bound checks record how far the worst sample crosses the bound (0 if never).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub samples: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Reported quantity that is not judged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub suite: Suite,
    pub seed: u64,
    pub config: VerifyConfig,
    pub records: Vec<Record>,
    pub observations: Vec<Observation>,
    pub pass: bool,
    pub wall_time_s: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite or mapped to null")
    }
}

pub(crate) struct Runner {
    seed: u64,
    config: VerifyConfig,
    next_stream: u64,
    records: Vec<Record>,
    observations: Vec<Observation>,
}

impl Runner {
    fn new(seed: u64, config: VerifyConfig) -> Self {
        Self {
            seed,
            config,
            next_stream: 0,
            records: Vec::new(),
            observations: Vec::new(),
        }
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.config
    }

    /// Fresh independent rng streams for one check.
    fn streams(&mut self) -> u64 {
        let base = self.next_stream;
        self.next_stream += 1 << 32;
        base
    }

    /// Runs `f` on `samples` independent streams and records the largest value.
    pub fn max_over<F>(&mut self, name: impl Into<String>, samples: usize, tolerance: f64, f: F) -> Result<f64>
    where
        F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
    {
        let base = self.streams();
        let seed = self.seed;
        let worst = (0..samples as u64)
            .into_par_iter()
            .map(|i| f(&mut stream_rng(seed, base + i)).map(|d| if d.is_nan() { f64::INFINITY } else { d }))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        self.record(name, samples, worst, tolerance);
        Ok(worst)
    }

    pub fn record(&mut self, name: impl Into<String>, samples: usize, deviation: f64, tolerance: f64) {
        self.records.push(Record {
            name: name.into(),
            samples,
            max_deviation: deviation,
            tolerance,
            pass: deviation <= tolerance,
        });
    }

    pub fn observe(&mut self, name: impl Into<String>, value: f64) {
        self.observations.push(Observation {
            name: name.into(),
            value,
        });
    }

    /// Rng for a sequential check.
    pub fn rng(&mut self) -> ChaCha8Rng {
        let base = self.streams();
        stream_rng(self.seed, base)
    }
}

pub fn run_suite(suite: Suite, seed: u64, config: VerifyConfig) -> Result<Report> {
    if config.samples == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    if !(config.rmax > 0.0 && config.rmax < 1.0 && config.fd_rmax > 0.0 && config.fd_rmax < 1.0) {
        return Err(Error::InvalidArgument("sampling radii must lie in (0, 1)".into()));
    }
    let start = Instant::now();
    let mut runner = Runner::new(seed, config);
    for part in suite.parts() {
        match part {
            Suite::Hyperbolic => hyperbolic::run(&mut runner)?,
            Suite::Domains => domains::run(&mut runner)?,
            Suite::Barycentre => barycentre::run(&mut runner)?,
            Suite::Operators => operators::run(&mut runner)?,
            Suite::Entropy => entropy::run(&mut runner)?,
            Suite::All => unreachable!("expanded by parts"),
        }
    }
    let pass = runner.records.iter().all(|r| r.pass);
    Ok(Report {
        schema: SCHEMA,
        suite,
        seed,
        config,
        records: runner.records,
        observations: runner.observations,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Relative max-entry error `|a - b|_max / max(|b|_max, floor)`.
pub(crate) fn rel_err(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>, floor: f64) -> f64 {
    (a - b).amax() / b.amax().max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn runner_reduces_to_maximum() {
        let mut r = Runner::new(1, VerifyConfig::with_samples(10));
        let worst = r.max_over("x", 64, 1.0, |rng| Ok(rand::Rng::random::<f64>(rng))).unwrap();
        assert!(worst > 0.5 && worst < 1.0);
        r.max_over("nan", 2, 1.0, |_| Ok(f64::NAN)).unwrap();
        assert!(r.records[0].pass);
        assert!(!r.records[1].pass);
    }
}
