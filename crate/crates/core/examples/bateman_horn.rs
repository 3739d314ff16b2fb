//! Observed vs predicted counts for polynomial families: a seeded
//! ensemble for twins {x, x+2} and a sweep table for a quadratic family.
//!
//! Run with: cargo run --example bateman_horn

use cgmodel::experiments::{bateman_horn_sweep, run_bateman_horn, EnsembleOptions};
use cgmodel::poly::PolynomialFamily;

fn main() -> cgmodel::Result<()> {
    let twin = PolynomialFamily::parse("x,x+2")?;
    let seeds: Vec<u64> = (0..32).collect();
    let report = run_bateman_horn(&twin, 500_000, &seeds, &EnsembleOptions::default())?;
    println!(
        "{{x, x+2}} at x = 5e5 over {} seeds:\n  mean {:.1}  stddev {:.1}  predicted {:.1}  ratio {:.4}",
        report.seeds.len(),
        report.mean,
        report.stddev,
        report.predicted,
        report.ratio
    );
    let cert = report.certificate.expect("32 seeds produce a certificate");
    println!(
        "  Kim-Vu: threshold {:.3e}, violations {}",
        cert.threshold, cert.violations
    );

    // Growth of the count along geometric checkpoints, one seed. The
    // sampled range must reach f(x) = x^2 + 1, so x stays modest here.
    let quad = PolynomialFamily::parse("x^2+1")?;
    println!("\nx^2+1 sweep (seed 0):");
    println!(
        "{:>9} {:>9} {:>11} {:>7}",
        "x", "observed", "predicted", "ratio"
    );
    for row in bateman_horn_sweep(&quad, 20_000, 0, &EnsembleOptions::default(), 7)? {
        println!(
            "{:>9} {:>9} {:>11.1} {:>7.3}",
            row.x,
            row.observed,
            row.predicted,
            row.observed as f64 / row.predicted
        );
    }
    Ok(())
}
