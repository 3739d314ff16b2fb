//! The random-set measure and its seeded realizations.
//!
//! Membership of `n` is an independent Bernoulli draw with probability
//! `min(1, M(T(n))/log n)` when `n` is coprime to every prime up to
//! `T(n) = log n / log log log n`, and 0 otherwise. The draw for `n` is a
//! pure function of `(seed, n)` through a counter-based mix, so a sampled
//! set is independent of range, evaluation order, and thread count.

use std::io::Write;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::primes::PrimeTable;

/// Parameters of the measure plus the sampling seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParameters {
    pub seed: u64,
    /// Membership probability is 0 below this cutoff. Must be >= 16 so the
    /// triple logarithm in `T(n)` is defined and positive.
    pub n_min: u64,
}

pub const DEFAULT_N_MIN: u64 = 16;

impl ModelParameters {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            n_min: DEFAULT_N_MIN,
        }
    }

    pub fn with_n_min(seed: u64, n_min: u64) -> Result<Self> {
        if n_min < 16 {
            return Err(Error::Validation(format!(
                "n_min must be at least 16 (T(n) is undefined below e^e), got {n_min}"
            )));
        }
        Ok(Self { seed, n_min })
    }
}

/// The sieving threshold `T(x) = log x / log log log x`.
pub fn threshold_t(x: f64) -> Result<f64> {
    if !(x >= 16.0) {
        return Err(Error::Domain(format!(
            "T(x) requires x >= 16 (triple log undefined or nonpositive), got {x}"
        )));
    }
    Ok(x.ln() / x.ln().ln().ln())
}

/// Primes up to 1024 and prefix Mertens products: `prefix_m[i]` is
/// `prod_{j<i} (1 - 1/p_j)^{-1}` over the first `i` primes. `T(n) <= 142`
/// for every `n >= 16` representable in 64 bits, so this covers all
/// thresholds the model can produce.
fn prime_prefix() -> &'static (Vec<u64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<u64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| {
        let table = PrimeTable::sieve(1024).expect("tiny sieve");
        let primes: Vec<u64> = table.primes().collect();
        let mut prefix = Vec::with_capacity(primes.len() + 1);
        let mut m = 1.0f64;
        prefix.push(m);
        for &p in &primes {
            m *= p as f64 / (p - 1) as f64;
            prefix.push(m);
        }
        (primes, prefix)
    })
}

/// `Pr(n in A)` under the measure: 0 below `n_min` or when a prime
/// `p <= T(n)` divides `n`, else `min(1, M(T(n))/log n)`.
pub fn membership_probability(n: u64, params: &ModelParameters) -> f64 {
    if n < params.n_min {
        return 0.0;
    }
    // T(n) >= 10.2 for every n >= 16, so {2,3,5,7} always sieve; reject
    // their multiples before touching any logarithm.
    if n.is_multiple_of(2) || n.is_multiple_of(3) || n.is_multiple_of(5) || n.is_multiple_of(7) {
        return 0.0;
    }
    let t = threshold_t(n as f64).expect("n >= n_min >= 16");
    debug_assert!(t > 10.0);
    let (primes, prefix) = prime_prefix();
    let count = primes.partition_point(|&p| p as f64 <= t);
    for &p in &primes[4..count] {
        if p > n {
            break;
        }
        if n.is_multiple_of(p) {
            return 0.0;
        }
    }
    (prefix[count] / (n as f64).ln()).min(1.0)
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based uniform draw in [0, 1), keyed by `(seed, n)`.
pub fn uniform_draw(seed: u64, n: u64) -> f64 {
    let h = mix64(mix64(n.wrapping_mul(GOLDEN)) ^ seed);
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One Bernoulli membership draw for `n`.
pub fn member_draw(n: u64, params: &ModelParameters) -> bool {
    let q = membership_probability(n, params);
    q > 0.0 && uniform_draw(params.seed, n) < q
}

/// Exact `sum_{n in [lo, hi]} Pr(n in A)`. Empty ranges sum to 0.
pub fn expected_count(lo: u64, hi: u64, params: &ModelParameters) -> f64 {
    if lo > hi {
        return 0.0;
    }
    let mut sum = CompensatedSum::new();
    for n in lo..=hi {
        sum.add(membership_probability(n, params));
    }
    sum.value()
}

/// Manifest sufficient to regenerate a sample bit-for-bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleManifest {
    pub version: String,
    pub seed: u64,
    pub n_min: u64,
    pub lo: u64,
    pub hi: u64,
}

/// One seeded realization of the measure over `[lo, hi]`, stored as a
/// bitset. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledSet {
    params: ModelParameters,
    lo: u64,
    hi: u64,
    bits: Vec<u64>,
}

impl SampledSet {
    pub fn params(&self) -> &ModelParameters {
        &self.params
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.lo || n > self.hi {
            return false;
        }
        let idx = (n - self.lo) as usize;
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// Members in increasing order.
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        (self.lo..=self.hi).filter(move |&n| self.contains(n))
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of members `<= x`.
    pub fn count_up_to(&self, x: u64) -> u64 {
        if x < self.lo {
            return 0;
        }
        let x = x.min(self.hi);
        let idx = (x - self.lo) as usize;
        let word = idx / 64;
        let mut c: u64 = self.bits[..word]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        let bit = idx % 64;
        let mask = if bit == 63 {
            u64::MAX
        } else {
            (1u64 << (bit + 1)) - 1
        };
        c += (self.bits[word] & mask).count_ones() as u64;
        c
    }

    pub fn manifest(&self) -> SampleManifest {
        SampleManifest {
            version: crate::VERSION.to_string(),
            seed: self.params.seed,
            n_min: self.params.n_min,
            lo: self.lo,
            hi: self.hi,
        }
    }

    /// Serialize the membership bitset as packed little-endian bytes,
    /// LSB-first: byte `i`, bit `b` holds membership of `lo + 8i + b`.
    pub fn write_bitset<W: Write>(&self, mut w: W) -> Result<()> {
        let n_bytes = ((self.hi - self.lo + 1) as usize).div_ceil(8);
        let mut bytes = Vec::with_capacity(n_bytes);
        for i in 0..n_bytes {
            let word = self.bits[i / 8];
            bytes.push((word >> (8 * (i % 8))) as u8);
        }
        w.write_all(&bytes)?;
        Ok(())
    }

    /// Textual member list, one per line (for small ranges).
    pub fn member_list(&self) -> String {
        let mut out = String::new();
        for n in self.members() {
            out.push_str(&n.to_string());
            out.push('\n');
        }
        out
    }

    /// Regenerate a sample from its manifest; bit-identical to the run
    /// that produced it.
    pub fn from_manifest(m: &SampleManifest) -> Result<Self> {
        let params = ModelParameters::with_n_min(m.seed, m.n_min)?;
        sample_range(m.lo, m.hi, &params)
    }
}

/// Sample one realization over `[lo, hi]`.
///
/// Words of the bitset are filled in parallel; every bit depends only on
/// `(seed, n)`, so the result is identical under any thread count.
pub fn sample_range(lo: u64, hi: u64, params: &ModelParameters) -> Result<SampledSet> {
    sample_range_with_budget(lo, hi, params, crate::mem_budget())
}

pub fn sample_range_with_budget(
    lo: u64,
    hi: u64,
    params: &ModelParameters,
    budget_bytes: u64,
) -> Result<SampledSet> {
    if lo < 2 || lo > hi {
        return Err(Error::Domain(format!(
            "sample range requires 2 <= lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if params.n_min < 16 {
        return Err(Error::Validation(format!(
            "n_min must be at least 16, got {}",
            params.n_min
        )));
    }
    let span = hi - lo + 1;
    let n_words = (span as usize).div_ceil(64);
    let required = 8 * n_words as u64;
    if required > budget_bytes {
        return Err(Error::Resource {
            required_bytes: required,
            budget_bytes,
        });
    }
    let params = *params;
    let bits: Vec<u64> = (0..n_words)
        .into_par_iter()
        .map(|w| {
            let mut word = 0u64;
            let base = lo + 64 * w as u64;
            for b in 0..64u64 {
                let n = base + b;
                if n > hi {
                    break;
                }
                if member_draw(n, &params) {
                    word |= 1 << b;
                }
            }
            word
        })
        .collect();
    Ok(SampledSet {
        params,
        lo,
        hi,
        bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        // x = e^(e^e): the triple log is exactly 1, so T = log x = e^e.
        let x = std::f64::consts::E.exp().exp();
        let t = threshold_t(x).unwrap();
        assert!((t - std::f64::consts::E.exp()).abs() < 1e-9);
        assert!((t - 15.154_262_241_479_264).abs() < 1e-9);

        let t = threshold_t(1e6).unwrap();
        assert!((t - 14.310_918_311_041_613).abs() < 1e-9);

        assert!(threshold_t(15.0).is_err());
    }

    #[test]
    fn membership_zero_cases() {
        let p = ModelParameters::new(7);
        for n in [2u64, 10, 15] {
            assert_eq!(membership_probability(n, &p), 0.0); // below n_min
        }
        for n in (16..200).step_by(2) {
            assert_eq!(membership_probability(n, &p), 0.0); // even
        }
        // A prime that is itself below its own threshold: T(17) ~ 69.8.
        assert_eq!(membership_probability(17, &p), 0.0);
    }

    #[test]
    fn membership_101() {
        // T(101) ~ 10.86 so the sieving primes are {2,3,5,7};
        // M = 2 * 3/2 * 5/4 * 7/6 = 4.375 and q = 4.375/log 101.
        let p = ModelParameters::new(0);
        let q = membership_probability(101, &p);
        assert!((q - 0.947_970_910_842_951).abs() < 1e-9, "q = {q}");
    }

    #[test]
    fn membership_large_coprime_vs_smooth() {
        let p = ModelParameters::new(0);
        // 10^6 + 1 = 101 * 9901: coprime to all primes <= T ~ 14.3.
        assert!(membership_probability(1_000_001, &p) > 0.0);
        // 10^6 + 5 is divisible by 3 and 5.
        assert_eq!(membership_probability(1_000_005, &p), 0.0);
    }

    #[test]
    fn small_n_clamp_exists_but_not_above_1e4() {
        let p = ModelParameters::new(0);
        // 53 is prime with T(53) ~ 12.4: coprime, and M/log 53 > 1.
        assert_eq!(membership_probability(53, &p), 1.0);
        // No clamping for n >= 1e4 (invariant asserted over a scan).
        let mut max_q: f64 = 0.0;
        for n in 10_000u64..1_000_000 {
            let q = membership_probability(n, &p);
            assert!(q < 1.0, "clamped at {n}");
            max_q = max_q.max(q);
        }
        assert!(max_q > 0.0);
    }

    #[test]
    fn sampling_deterministic() {
        let p = ModelParameters::new(42);
        let a = sample_range(2, 50_000, &p).unwrap();
        let b = sample_range(2, 50_000, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_prefix_consistent() {
        let p = ModelParameters::new(9);
        let full = sample_range(2, 40_000, &p).unwrap();
        let half = sample_range(2, 17_111, &p).unwrap();
        for n in 2..=17_111 {
            assert_eq!(full.contains(n), half.contains(n), "n={n}");
        }
        // And under a different lower endpoint: membership is range-free.
        let shifted = sample_range(10_000, 40_000, &p).unwrap();
        for n in 10_000..=40_000 {
            assert_eq!(full.contains(n), shifted.contains(n), "n={n}");
        }
    }

    #[test]
    fn sampling_thread_count_invariant() {
        let p = ModelParameters::new(1234);
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = pool1.install(|| sample_range(2, 100_000, &p)).unwrap();
        let b = pool4.install(|| sample_range(2, 100_000, &p)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sample_support_respects_sieving() {
        let p = ModelParameters::new(5);
        let s = sample_range(2, 100_000, &p).unwrap();
        for n in s.members() {
            assert!(n >= 16);
            let t = threshold_t(n as f64).unwrap();
            let (primes, _) = prime_prefix();
            for &q in primes.iter().take_while(|&&q| q as f64 <= t) {
                assert_ne!(n % q, 0, "member {n} divisible by sieving prime {q}");
            }
        }
    }

    #[test]
    fn sample_density_matches_expectation() {
        // Mean count over seeds should sit within 4 binomial sigma of the
        // exact expectation.
        let lo = 900_000u64;
        let hi = 1_000_000u64;
        let p0 = ModelParameters::new(0);
        let expected = expected_count(lo, hi, &p0);
        let mut var = 0.0;
        for n in lo..=hi {
            let q = membership_probability(n, &p0);
            var += q * (1.0 - q);
        }
        let seeds = 100u64;
        let mut total = 0u64;
        for seed in 0..seeds {
            let s = sample_range(lo, hi, &ModelParameters::new(seed)).unwrap();
            total += s.count();
        }
        let mean = total as f64 / seeds as f64;
        let sigma = (var / seeds as f64).sqrt();
        assert!(
            (mean - expected).abs() < 4.0 * sigma,
            "mean {mean}, expected {expected}, sigma {sigma}"
        );
    }

    #[test]
    fn expected_count_cases() {
        let p = ModelParameters::new(3);
        assert_eq!(expected_count(10, 9, &p), 0.0);
        assert_eq!(expected_count(2, 15, &p), 0.0);
        let v = expected_count(16, 10_000, &p);
        assert!(v > 0.0);
        let w = expected_count(16, 10_000, &p);
        assert_eq!(v.to_bits(), w.to_bits());
    }

    #[test]
    fn bitset_roundtrip_bytes() {
        let p = ModelParameters::new(77);
        let s = sample_range(2, 1000, &p).unwrap();
        let mut buf = Vec::new();
        s.write_bitset(&mut buf).unwrap();
        assert_eq!(buf.len(), 999usize.div_ceil(8));
        for n in 2..=1000u64 {
            let idx = (n - 2) as usize;
            let bit = buf[idx / 8] >> (idx % 8) & 1 == 1;
            assert_eq!(bit, s.contains(n));
        }
    }

    #[test]
    fn manifest_roundtrip() {
        let p = ModelParameters::new(31);
        let s = sample_range(2, 5000, &p).unwrap();
        let m = s.manifest();
        let json = serde_json::to_string(&m).unwrap();
        let back: SampleManifest = serde_json::from_str(&json).unwrap();
        let s2 = SampledSet::from_manifest(&back).unwrap();
        assert_eq!(s, s2);
    }

    #[test]
    fn sample_budget_enforced() {
        let p = ModelParameters::new(0);
        match sample_range_with_budget(2, 1 << 40, &p, 4096) {
            Err(Error::Resource { budget_bytes, .. }) => assert_eq!(budget_bytes, 4096),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn calibration_smoke() {
        // Quick version of the full acceptance calibration: a few points,
        // 2000 seeds, 4 sigma.
        let points = [101u64, 1009, 10_007, 100_003];
        for &n in &points {
            let q = membership_probability(n, &ModelParameters::new(0));
            assert!(q > 0.0);
            let trials = 2000u64;
            let mut hits = 0u64;
            for seed in 0..trials {
                if member_draw(n, &ModelParameters::new(seed)) {
                    hits += 1;
                }
            }
            let freq = hits as f64 / trials as f64;
            let sigma = (q * (1.0 - q) / trials as f64).sqrt();
            assert!(
                (freq - q).abs() <= 4.0 * sigma.max(1e-12),
                "n={n}: freq {freq}, q {q}, sigma {sigma}"
            );
        }
    }
}
