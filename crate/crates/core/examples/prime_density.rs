//! How many members of a realization are genuine primes, compared to the
//! Mertens-weighted prediction over the Stieltjes sum of 1/log p.
//!
//! Run with: cargo run --example prime_density

use cgmodel::experiments::{prime_density_sweep, run_prime_density, EnsembleOptions};
use cgmodel::primes::PrimeTable;

fn main() -> cgmodel::Result<()> {
    let x = 2_000_000u64;
    let table = PrimeTable::sieve(x)?;
    println!("pi({x}) = {}", table.pi(x));

    let seeds: Vec<u64> = (0..8).collect();
    let report = run_prime_density(x, &seeds, &EnsembleOptions::default())?;
    println!(
        "prime members up to {x} over {} seeds: mean {:.1}  predicted {:.1}  ratio {:.4}",
        seeds.len(),
        report.mean,
        report.predicted,
        report.ratio
    );
    println!(
        "(a fraction ~{:.2}% of all primes below x land in a realization)",
        100.0 * report.mean / table.pi(x) as f64
    );

    println!("\nsweep (seed 1):");
    println!(
        "{:>9} {:>9} {:>11} {:>7}",
        "x", "observed", "predicted", "ratio"
    );
    for row in prime_density_sweep(x, 1, &EnsembleOptions::default(), 8)? {
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
