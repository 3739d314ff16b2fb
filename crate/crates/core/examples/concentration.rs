//! Empirical check of the Kim–Vu concentration bound: ensemble
//! deviations sit far below the certified threshold.
//!
//! Run with: cargo run --example concentration

use cgmodel::experiments::{kimvu_threshold, run_bateman_horn, EnsembleOptions};
use cgmodel::poly::PolynomialFamily;

fn main() -> cgmodel::Result<()> {
    let twin = PolynomialFamily::parse("x,x+2")?;
    let x = 100_000u64;
    let seeds: Vec<u64> = (0..100).collect();
    let opts = EnsembleOptions {
        lambda: Some(3.0 * (x as f64).ln()),
        ..EnsembleOptions::default()
    };
    let report = run_bateman_horn(&twin, x, &seeds, &opts)?;
    let cert = report.certificate.expect("certificate for 100 seeds");
    let max_dev = cert
        .observed_deviations
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    println!(
        "twin count at x = 1e5, {} seeds: mean {:.1}, stddev {:.1}",
        seeds.len(),
        report.mean,
        report.stddev
    );
    println!(
        "certificate: k = {}, lambda = {:.2}, E' = {}, E = {:.1}",
        cert.k, cert.lambda, cert.e_prime, cert.e
    );
    println!(
        "threshold {:.3e}, largest observed deviation {:.1} ({:.1e} of threshold), violations {}",
        cert.threshold,
        max_dev,
        max_dev / cert.threshold,
        cert.violations
    );

    // The threshold scales like lambda^k; halving lambda weakens the
    // tail probability bound e^{-lambda}, not the count's behaviour.
    println!("\nthreshold versus lambda (k = 2, E' = 2, E as above):");
    for mult in [1.0, 2.0, 3.0, 5.0] {
        let lambda = mult * (x as f64).ln();
        println!(
            "  lambda = {mult} log x: {:.3e}",
            kimvu_threshold(2, lambda, 2.0, cert.e)
        );
    }
    Ok(())
}
