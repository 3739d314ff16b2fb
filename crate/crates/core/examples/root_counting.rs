//! Count roots of integer polynomials modulo primes with the
//! Frobenius-gcd method, cross-checked against brute force, and run the
//! small-prime irreducibility screen.
//!
//! Run with: cargo run --example root_counting

use cgmodel::poly::{
    count_roots, count_roots_bruteforce, count_roots_frobenius, irreducibility_screen,
    IntPolynomial,
};
use cgmodel::primes::PrimeTable;

fn main() -> cgmodel::Result<()> {
    let table = PrimeTable::sieve(100)?;
    for src in ["x^2+1", "x^3-x+1", "x^2-5", "2x^2+3x-2"] {
        let f: IntPolynomial = src.parse()?;
        print!("omega_f(p) for f = {f}: ");
        for p in table.primes().take(10) {
            let rc = count_roots(&f, p)?;
            print!("{}:{} ", p, rc.omega);
        }
        println!();
    }

    // The two root counters agree; Frobenius stays fast for large p.
    let f: IntPolynomial = "x^4-10x^2+1".parse()?;
    for p in [101u64, 1009, 10007] {
        let brute = count_roots_bruteforce(&f, p)?;
        let frob = count_roots_frobenius(&f, p)?;
        assert_eq!(brute.omega, frob.omega);
        println!("p = {p:>6}: omega = {} (both methods)", frob.omega);
    }

    // x^4 - 10x^2 + 1 is irreducible over Z yet reducible mod every
    // prime, so the mod-p screen alone cannot certify it.
    println!("\nscreen results (prime budget 200):");
    for src in ["x^2+1", "x^2-1", "x^4-10x^2+1", "3x^2+3"] {
        let f: IntPolynomial = src.parse()?;
        let screen = irreducibility_screen(&f, 200)?;
        println!("  {f}: {:?}", screen.verdict);
    }
    Ok(())
}
