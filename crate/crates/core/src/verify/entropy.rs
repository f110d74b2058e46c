use crate::entropy::{condition_a_probe, critical_exponent, radial_probe, ProbeConfig, Verdict};
use crate::error::Result;
use crate::geometry::Geometry;

use super::Runner;

const TOL: f64 = 0.05;

fn mismatch(got: Verdict, want: Verdict) -> f64 {
    if got == want {
        0.0
    } else {
        1.0
    }
}

pub(super) fn run(r: &mut Runner) -> Result<()> {
    let cfg = ProbeConfig::default();
    let spaces = [
        (Geometry::Ball { n: 1 }, 1.0),
        (Geometry::Ball { n: 2 }, 2.0),
        (Geometry::Ball { n: 3 }, 3.0),
        (Geometry::Polydisc { r: 2 }, 1.0),
    ];
    for (g, expected) in spaces {
        let c = critical_exponent(g, TOL)?;
        r.record(format!("{g}.critical_exponent"), 1, (c - expected).abs(), TOL);
        let x = g.x_constant();
        r.record(format!("{g}.diastatic_entropy"), 1, (x * c - x * expected).abs(), 2.0 * TOL * x);
        r.observe(format!("{g}.critical_exponent"), c);

        let mut wrong = 0.0f64;
        let mut probes = 0;
        for off in [0.2, 0.3, 0.5, 1.0, 2.0] {
            wrong = wrong.max(mismatch(radial_probe(g, c + off, &cfg)?.verdict, Verdict::Convergent));
            probes += 1;
            if c - off > 0.0 {
                wrong = wrong.max(mismatch(radial_probe(g, c - off, &cfg)?.verdict, Verdict::Divergent));
                probes += 1;
            }
        }
        r.record(format!("{g}.separated_verdicts"), probes, wrong, 0.0);

        if let Geometry::Ball { n } = g {
            let n = n as f64;
            let conv = condition_a_probe(g, n + 0.5, &cfg)?.verdict;
            let div = condition_a_probe(g, n, &cfg)?.verdict;
            r.record(
                format!("{g}.condition_a"),
                2,
                mismatch(conv, Verdict::Convergent).max(mismatch(div, Verdict::Divergent)),
                0.0,
            );
        }
    }
    Ok(())
}
