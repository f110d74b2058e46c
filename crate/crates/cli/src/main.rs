//! `diastasis` command-line front end.
//!
//! Points are passed as comma-separated interleaved reals `re1,im1,re2,im2,...`
//! (matrices row-major). Results are printed as JSON. Exit codes: 0 success,
//! 1 failed verification suite, 2 usage or domain error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use diastasis::barycentre::{solve_barycentre, ProblemFile, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use diastasis::entropy::critical_exponent;
use diastasis::geometry::{self, Geometry, GeometryPoint};
use diastasis::verify::{run_suite, Suite, VerifyConfig};

#[derive(Parser)]
#[command(name = "diastasis", version, about = "Diastasis geometry, barycentres and entropy probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Diastasis D(w, z).
    Diastasis(PairArgs),
    /// Geodesic distance between w and z.
    Distance(PairArgs),
    /// Solve a barycentre problem file.
    Barycentre {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Critical exponent and diastatic entropy of a ball or polydisc.
    Entropy {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
    /// Run a property suite: hyperbolic, domains, barycentre, operators, entropy or all.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(clap::Args)]
struct PairArgs {
    /// ball<n>, polydisc<r> or omega1-<m>
    #[arg(long)]
    space: String,
    #[arg(long, allow_hyphen_values = true)]
    w: String,
    #[arg(long, allow_hyphen_values = true)]
    z: String,
}

/// Failure of a command: message and exit code.
struct Failure(String, u8);

impl From<diastasis::Error> for Failure {
    fn from(e: diastasis::Error) -> Self {
        Failure(e.to_string(), 2)
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure(format!("cannot parse '{t}' as a number"), 2))
        })
        .collect()
}

fn parse_point(space: Geometry, s: &str) -> Result<GeometryPoint, Failure> {
    Ok(GeometryPoint::from_real(space, &parse_reals(s)?)?)
}

fn pair(args: &PairArgs) -> Result<(Geometry, GeometryPoint, GeometryPoint), Failure> {
    let space: Geometry = args.space.parse()?;
    Ok((space, parse_point(space, &args.w)?, parse_point(space, &args.z)?))
}

fn run(cli: Cli) -> Result<(Value, u8), Failure> {
    match cli.command {
        Command::Diastasis(args) => {
            let (space, w, z) = pair(&args)?;
            Ok((json!({"space": space.to_string(), "diastasis": geometry::diastasis(&w, &z)?}), 0))
        }
        Command::Distance(args) => {
            let (space, w, z) = pair(&args)?;
            Ok((json!({"space": space.to_string(), "distance": geometry::distance(&w, &z)?}), 0))
        }
        Command::Barycentre { problem, tol, max_iters } => {
            let text = fs::read_to_string(&problem)
                .map_err(|e| Failure(format!("cannot read {}: {e}", problem.display()), 2))?;
            let p = ProblemFile::from_json(&text)?.to_problem()?;
            let sol = solve_barycentre(&p, tol, max_iters)?;
            let point: Vec<[f64; 2]> = sol.point.coords().iter().map(|c| [c.re, c.im]).collect();
            Ok((
                json!({
                    "point": point,
                    "residual": sol.residual,
                    "iterations": sol.iterations,
                    "min_hessian_eigenvalue": sol.min_hessian_eigenvalue,
                    "t": p.t(),
                    "c": p.exponent(),
                }),
                0,
            ))
        }
        Command::Entropy { space, tol } => {
            let g: Geometry = space.parse()?;
            let c = critical_exponent(g, tol)?;
            Ok((
                json!({
                    "space": g.to_string(),
                    "tol": tol,
                    "critical_exponent": c,
                    "x_constant": g.x_constant(),
                    "entropy": g.x_constant() * c,
                }),
                0,
            ))
        }
        Command::Verify { suite, seed, samples } => {
            let suite: Suite = suite.parse()?;
            let report = run_suite(suite, seed, VerifyConfig::with_samples(samples))?;
            let code = if report.pass { 0 } else { 1 };
            let value = serde_json::to_value(&report).expect("report serializes");
            Ok((value, code))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((value, code)) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("json value serializes"));
            ExitCode::from(code)
        }
        Err(Failure(msg, code)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
