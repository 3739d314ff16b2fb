//! Compute the model's number-theoretic constants: truncated Mertens
//! products, the twin constant C2, and singular series for a few families.
//!
//! Run with: cargo run --example constants

use cgmodel::poly::PolynomialFamily;
use cgmodel::primes::{mertens_product, MertensKind};
use cgmodel::singular::{asymptotic_residuals, compute_c2, compute_cf};

fn main() -> cgmodel::Result<()> {
    for t in [1e2, 1e3, 1e4, 1e5] {
        let m = mertens_product(t, 1, MertensKind::Inverse)?;
        let c2 = compute_c2(t)?;
        println!(
            "T = {t:>8}: prod (1-1/p)^-1 = {:<18.12} C2(T) = {:.12}",
            m.value, c2
        );
    }

    println!();
    for desc in ["x,x+2", "x,x+4", "x,x+2,x+6", "x^2+1"] {
        let family = PolynomialFamily::parse(desc)?.check_admissibility()?;
        let cf = compute_cf(&family, 1e5)?;
        println!(
            "C_f {{{}}}  (k = {}): {:.12}  tail ~ {:.1e}",
            cf.family, cf.k, cf.value, cf.tail_error
        );
    }

    // An inadmissible family is rejected with its obstructing prime.
    let bad = PolynomialFamily::parse("x,x+1")?;
    match compute_cf(&bad, 1e4) {
        Err(e) => println!("\n{{x, x+1}} rejected as expected: {e}"),
        Ok(_) => unreachable!("fixed divisor 2 must be detected"),
    }

    // Residuals of the truncated products against their asymptotics.
    let twin = PolynomialFamily::parse("x,x+2")?.check_admissibility()?;
    let res = asymptotic_residuals(2, 1e5, Some(&twin))?;
    println!(
        "\nasymptotic residuals at T = 1e5: mertens {:.4}, family {:.4}",
        res.mertens,
        res.family.unwrap()
    );
    Ok(())
}
