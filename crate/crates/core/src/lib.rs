//! Laboratory for a sieve-weighted random model of the primes.
//!
//! The model assigns each integer `n ≥ 2` an independent membership
//! probability `min(1, M(T(n))/log n)` when `n` is coprime to every prime
//! `p ≤ T(n) = log n / log log log n`, and `0` otherwise, where `M(T)` is the
//! truncated Mertens product `∏_{p≤T} (1 − 1/p)⁻¹`. Seeded realizations of
//! that measure can then be counted against the singular-series predictions
//! of the Bateman–Horn and extended Goldbach heuristics, with Kim–Vu
//! concentration certificates attached to each ensemble.
//!
//! Module map:
//!
//! - [`primes`] — sieve, prime counting, primorials, Mertens products,
//!   64-bit factorization. The arithmetic substrate.
//! - [`poly`] — integer polynomials, root counting mod p (brute force and
//!   Frobenius-gcd), irreducibility screening, admissible families.
//! - [`singular`] — truncated Euler products: the Bateman–Horn constant
//!   `C_f`, the twin-prime constant `C₂`, Goldbach local factors.
//! - [`sampler`] — the random-set measure itself: membership probabilities
//!   and deterministic counter-based sampling of realizations.
//! - [`experiments`] — observed-vs-predicted counting, quadrature of the
//!   predicted main terms, Kim–Vu certificates, seeded ensembles, reports.
//! - [`cli`] — the `cgmodel` command-line front end.
//!
//! Everything is deterministic: identical seeds produce bit-identical
//! samples and reports regardless of evaluation order or thread count.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod numeric;
pub mod poly;
pub mod primes;
pub mod sampler;
pub mod singular;

pub use error::{Error, Result};

/// Library version, embedded in run manifests for reproducibility.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the memory budget (in bytes) for sieves
/// and sampled ranges.
pub const MEM_BUDGET_ENV: &str = "CGMODEL_MEM_BUDGET";

const DEFAULT_MEM_BUDGET: u64 = 1 << 30;

/// Memory budget in bytes for large allocations (sieve bitsets, sample
/// bitsets). Defaults to 1 GiB, overridable via [`MEM_BUDGET_ENV`].
pub fn mem_budget() -> u64 {
    std::env::var(MEM_BUDGET_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MEM_BUDGET)
}
