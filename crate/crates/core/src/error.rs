//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid input (duplicate family members, bad config
    /// keys, too few seeds, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// An allocation would exceed the configured memory budget.
    #[error("resource error: requires {required_bytes} bytes but the memory budget is {budget_bytes} bytes (override with CGMODEL_MEM_BUDGET)")]
    Resource {
        required_bytes: u64,
        budget_bytes: u64,
    },

    /// A polynomial family has a fixed prime divisor, so its singular
    /// series vanishes.
    #[error("family is inadmissible: omega_f({p}) = {p}, every value of f is divisible by {p}")]
    Inadmissible { p: u64 },

    /// The polynomial vanishes identically mod p; the Frobenius root count
    /// is undefined and the caller must use the brute-force path.
    #[error("polynomial is identically zero mod {p}; use the brute-force root count")]
    ZeroModP { p: u64 },

    /// A sampled set does not cover the range a count operation needs.
    #[error("sample covers [{have_lo}, {have_hi}] but the count requires coverage of [2, {required_hi}]")]
    InsufficientRange {
        required_hi: u64,
        have_lo: u64,
        have_hi: u64,
    },

    /// Text that could not be parsed (polynomials, config files, numbers).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable process exit code for the CLI contract:
    /// 1 usage, 2 validation, 3 resource.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } | Error::Io(_) => 3,
            _ => 2,
        }
    }
}
