//! Prime substrate: segmented odd-only sieve with popcount checkpoints,
//! primorials, truncated Mertens products, and 64-bit factorization.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Checkpoint spacing in 64-bit words (one checkpoint per 8192 odd numbers).
const CHECKPOINT_WORDS: usize = 64;

/// Segment size in words used while sieving (~2 MiB of numbers per segment).
const SEGMENT_WORDS: usize = 1 << 12;

/// Primality table for `[2, limit]`: a bitset over the odd integers plus
/// cumulative popcount checkpoints for amortized-O(1) `pi` queries.
///
/// Immutable after construction; safe to share across threads.
#[derive(Clone)]
pub struct PrimeTable {
    limit: u64,
    /// Bit `i` set means `2i + 1` is prime (`i >= 1`; index 0 is the number 1).
    bits: Vec<u64>,
    /// `checkpoints[j]` = number of set bits in words `[0, j * CHECKPOINT_WORDS)`.
    checkpoints: Vec<u64>,
}

impl PrimeTable {
    /// Sieve all primes up to `limit` inclusive.
    pub fn sieve(limit: u64) -> Result<Self> {
        Self::sieve_with_budget(limit, crate::mem_budget())
    }

    pub fn sieve_with_budget(limit: u64, budget_bytes: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Domain(format!(
                "sieve limit must be at least 2, got {limit}"
            )));
        }
        let n_odds = limit.div_ceil(2); // count of odd numbers in [1, limit]
        let n_words = (n_odds as usize).div_ceil(64);
        let required = 8 * n_words as u64 + 8 * (n_words / CHECKPOINT_WORDS + 1) as u64;
        if required > budget_bytes {
            return Err(Error::Resource {
                required_bytes: required,
                budget_bytes,
            });
        }

        let mut bits = vec![u64::MAX; n_words];
        // Clear bit 0 (the number 1) and any bits beyond n_odds.
        bits[0] &= !1u64;
        let tail = n_odds as usize % 64;
        if tail != 0 {
            *bits.last_mut().unwrap() &= (1u64 << tail) - 1;
        }

        let root = (limit as f64).sqrt() as u64 + 1;
        let base_primes = small_odd_primes(root);

        // Segmented marking: walk the bitset in cache-sized windows and
        // strike out odd multiples of each base prime within the window.
        let mut seg_start = 0usize;
        while seg_start < n_words {
            let seg_end = (seg_start + SEGMENT_WORDS).min(n_words);
            let lo_num = 2 * (seg_start as u64) * 64 + 1; // first odd in segment
            let hi_num = (2 * (seg_end as u64) * 64 - 1).min(limit); // last odd covered
            for &p in &base_primes {
                if p * p > hi_num {
                    break;
                }
                let mut m = (lo_num.div_ceil(p)) * p;
                if m < p * p {
                    m = p * p;
                }
                if m % 2 == 0 {
                    m += p;
                }
                while m <= hi_num {
                    let idx = ((m - 1) / 2) as usize;
                    bits[idx / 64] &= !(1u64 << (idx % 64));
                    m += 2 * p;
                }
            }
            seg_start = seg_end;
        }

        let mut checkpoints = Vec::with_capacity(n_words / CHECKPOINT_WORDS + 1);
        let mut running = 0u64;
        for (w, word) in bits.iter().enumerate() {
            if w % CHECKPOINT_WORDS == 0 {
                checkpoints.push(running);
            }
            running += word.count_ones() as u64;
        }

        Ok(Self {
            limit,
            bits,
            checkpoints,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Primality of `n`; `n` must not exceed the sieve limit.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(
            n <= self.limit,
            "is_prime({n}) beyond sieve limit {}",
            self.limit
        );
        if n == 2 {
            return true;
        }
        if n < 2 || n.is_multiple_of(2) {
            return false;
        }
        let idx = ((n - 1) / 2) as usize;
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// The prime-counting function `pi(n)` for `n <= limit`.
    pub fn pi(&self, n: u64) -> u64 {
        assert!(n <= self.limit, "pi({n}) beyond sieve limit {}", self.limit);
        if n < 2 {
            return 0;
        }
        if n == 2 {
            return 1;
        }
        let m = if n.is_multiple_of(2) { n - 1 } else { n }; // largest odd <= n
        let idx = ((m - 1) / 2) as usize;
        let word = idx / 64;
        let mut count = self.checkpoints[word / CHECKPOINT_WORDS];
        for w in (word / CHECKPOINT_WORDS) * CHECKPOINT_WORDS..word {
            count += self.bits[w].count_ones() as u64;
        }
        let bit = idx % 64;
        let mask = if bit == 63 {
            u64::MAX
        } else {
            (1u64 << (bit + 1)) - 1
        };
        count += (self.bits[word] & mask).count_ones() as u64;
        count + 1 // the prime 2
    }

    /// Iterate all primes in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(2).chain(OddPrimeIter {
            table: self,
            word: 0,
            current: self.bits[0],
        })
    }

    /// Iterate primes `p` with `lo <= p <= hi`.
    pub fn primes_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        self.primes()
            .skip_while(move |&p| p < lo)
            .take_while(move |&p| p <= hi)
    }
}

impl std::fmt::Debug for PrimeTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeTable")
            .field("limit", &self.limit)
            .finish_non_exhaustive()
    }
}

struct OddPrimeIter<'a> {
    table: &'a PrimeTable,
    word: usize,
    current: u64,
}

impl Iterator for OddPrimeIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as u64;
                self.current &= self.current - 1;
                return Some(2 * (self.word as u64 * 64 + bit) + 1);
            }
            self.word += 1;
            if self.word >= self.table.bits.len() {
                return None;
            }
            self.current = self.table.bits[self.word];
        }
    }
}

/// Simple sieve of the odd primes up to `limit`, used for base primes.
fn small_odd_primes(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    let mut p = 3usize;
    while p <= n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += 2 * p;
            }
        }
        p += 2;
    }
    primes
}

/// Exact primorial `P_T = prod_{p <= T} p`.
pub fn primorial(t: f64) -> Result<BigUint> {
    if !(t >= 2.0) {
        return Err(Error::Domain(format!("primorial requires T >= 2, got {t}")));
    }
    let table = PrimeTable::sieve(t.floor() as u64)?;
    let mut acc = BigUint::from(1u32);
    for p in table.primes() {
        acc *= BigUint::from(p);
    }
    Ok(acc)
}

/// Which side of the Mertens product to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MertensKind {
    /// `prod_{p<=T} (1 - 1/p)^{-k}`, asymptotically `e^{k gamma} (log T)^k`.
    Inverse,
    /// `prod_{p<=T} (1 - 1/p)^{k}`.
    Direct,
}

/// A truncated Mertens-type product, accumulated in log-space with
/// compensated summation so recomputation at the same `T` is bit-identical.
#[derive(Debug, Clone, Copy)]
pub struct MertensProduct {
    pub truncation: f64,
    pub k: u32,
    pub kind: MertensKind,
    pub value: f64,
    pub log_value: f64,
}

/// Compute `prod_{p<=T} (1 - 1/p)^{±k}`.
pub fn mertens_product(t: f64, k: u32, kind: MertensKind) -> Result<MertensProduct> {
    let table = PrimeTable::sieve(t.max(2.0).floor() as u64)?;
    mertens_product_with(&table, t, k, kind)
}

/// Same as [`mertens_product`] but reusing an existing table (which must
/// cover `T`).
pub fn mertens_product_with(
    table: &PrimeTable,
    t: f64,
    k: u32,
    kind: MertensKind,
) -> Result<MertensProduct> {
    if !(t >= 2.0) {
        return Err(Error::Domain(format!(
            "Mertens product requires T >= 2, got {t}"
        )));
    }
    if k == 0 {
        return Err(Error::Domain("Mertens product requires k >= 1".into()));
    }
    let hi = t.floor() as u64;
    let mut log_sum = CompensatedSum::new();
    for p in table.primes_in(2, hi) {
        log_sum.add((-1.0 / p as f64).ln_1p());
    }
    let signed = match kind {
        MertensKind::Inverse => -(k as f64) * log_sum.value(),
        MertensKind::Direct => k as f64 * log_sum.value(),
    };
    Ok(MertensProduct {
        truncation: t,
        k,
        kind,
        value: signed.exp(),
        log_value: signed,
    })
}

/// Deterministic Miller–Rabin for 64-bit integers; the base set
/// {2,3,5,7,11,13,17,19,23,29,31,37} is a proven witness set for all n < 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Brent-cycle Pollard rho; deterministic parameter sweep. `n` must be odd,
/// composite, and free of factors below 100.
fn pollard_rho(n: u64) -> u64 {
    for c in 1u64.. {
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let f = |v: u64| (mul_mod(v, v, n) + c) % n;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Complete factorization of `n` into `(prime, exponent)` pairs in
/// increasing prime order. `factorize(1)` is empty.
///
/// Trial division by small sieved primes, then deterministic Miller–Rabin
/// plus Pollard rho for any remaining cofactor.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut rem = n;
    for p in trial_primes() {
        if p * p > rem {
            break;
        }
        if rem.is_multiple_of(p) {
            let mut e = 0u32;
            while rem.is_multiple_of(p) {
                rem /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if rem > 1 {
        let mut stack = vec![rem];
        let mut large = Vec::new();
        while let Some(m) = stack.pop() {
            if is_prime_u64(m) {
                large.push(m);
            } else {
                let d = pollard_rho(m);
                stack.push(d);
                stack.push(m / d);
            }
        }
        large.sort_unstable();
        for m in large {
            match out.last_mut() {
                Some((p, e)) if *p == m => *e += 1,
                _ => out.push((m, 1)),
            }
        }
    }
    out
}

fn trial_primes() -> impl Iterator<Item = u64> {
    use std::sync::OnceLock;
    static SMALL: OnceLock<Vec<u64>> = OnceLock::new();
    SMALL
        .get_or_init(|| {
            let table = PrimeTable::sieve(1 << 16).expect("small sieve fits any budget");
            table.primes().collect()
        })
        .iter()
        .copied()
}
