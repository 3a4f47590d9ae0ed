//! Deterministic experiment harness: seeded random sets, verification
//! suites that record every checked inequality, and prime sweeps with CSV
//! output.
//!
//! Reproducibility contract: all randomness flows from a single published
//! 64-bit PRNG (SplitMix64) seeded explicitly, and all sampling uses
//! rejection-free order-stable algorithms, so identical (inputs, seed)
//! produce byte-identical reports on every platform.

pub mod suites;
pub mod sweep;

pub use suites::{
    suite_energy, suite_exact, suite_overlap_count, suite_rectification, suite_triple_chain,
    SetSource,
};
pub use sweep::{run_sweep, SweepConfig};

use crate::constructions::ConstructError;
use crate::field::FieldError;
use crate::set::{FpSet, SetError};
use crate::spectra::SpectraError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("subset size {size} out of range [1, {max}]")]
    BadSize { size: u64, max: u64 },
    #[error("bad density {0}")]
    BadDensity(String),
    #[error("source construction produced an empty set")]
    EmptySet,
    #[error("bad sweep config: {0}")]
    ConfigError(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// SplitMix64 (Steele–Lea–Flood), the published 64-bit mixer. Chosen over
/// an external RNG crate so that sampled sets are pinned by this source
/// file rather than by a dependency's version.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in 0..n (n ≥ 1), unbiased via rejection below 2⁶⁴ mod n.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n >= 1);
        let reject_below = n.wrapping_neg() % n; // 2⁶⁴ mod n
        loop {
            let v = self.next_u64();
            if v >= reject_below {
                return v % n;
            }
        }
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// A uniform size-`size` subset of F_p∖{0}, by partial Fisher–Yates over
/// the residues 1..p; identical (p, size, seed) give the identical set.
pub fn random_subset(p: u64, size: u64, seed: u64) -> Result<FpSet, HarnessError> {
    let mut rng = SplitMix64::new(seed);
    random_subset_with(&mut rng, p, size)
}

/// [`random_subset`] drawing from a caller-owned generator, for suites
/// that consume many sets from one seed.
pub fn random_subset_with(rng: &mut SplitMix64, p: u64, size: u64) -> Result<FpSet, HarnessError> {
    if size < 1 || size > p.saturating_sub(1) {
        return Err(HarnessError::BadSize { size, max: p.saturating_sub(1) });
    }
    let mut pool: Vec<u64> = (1..p).collect();
    for i in 0..size as usize {
        let j = i + rng.below(pool.len() as u64 - i as u64) as usize;
        pool.swap(i, j);
    }
    Ok(FpSet::from_elems(p, &pool[..size as usize])?)
}

/// Up to `want` items evenly spaced across `items`, order-preserving; the
/// first and last items are always included when `want` ≥ 2.
pub fn sample_evenly<T: Copy>(items: &[T], want: usize) -> Vec<T> {
    if want == 0 || items.is_empty() {
        return Vec::new();
    }
    if want >= items.len() {
        return items.to_vec();
    }
    if want == 1 {
        return vec![items[0]];
    }
    (0..want)
        .map(|i| items[i * (items.len() - 1) / (want - 1)])
        .collect()
}

/// All primes in [lo, hi] (inclusive), by sieve.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let n = hi as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for q in 2..=n {
        if !composite[q] {
            if q as u64 >= lo {
                primes.push(q as u64);
            }
            let mut m = q * q;
            while m <= n {
                composite[m] = true;
                m += q;
            }
        }
    }
    primes
}

/// One verified (or measured) inequality instance. Convention: `margin` is
/// the slack in the direction of the claim (≥ 0 iff the claim held), and
/// purely-measured records always pass.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckRecord {
    /// Which claim this instance belongs to.
    pub check: String,
    /// Compact digest of the inputs (prime, sizes, draw index, …).
    pub inputs: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

/// A suite run: every check recorded, failures and skips tallied, and the
/// suite's headline measured constant (when it has one).
#[derive(Debug, Clone, serde::Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub p_list: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    pub failures: usize,
    pub skips: usize,
    pub max_constant: Option<f64>,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub(crate) fn new(suite: &str, p_list: &[u64], trials: u64, seed: u64) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            p_list: p_list.to_vec(),
            trials,
            seed,
            failures: 0,
            skips: 0,
            max_constant: None,
            checks: Vec::new(),
        }
    }

    /// Records an asserted claim `lhs ≤/≥ rhs` with its slack.
    pub(crate) fn push(&mut self, check: &str, inputs: String, lhs: f64, rhs: f64, margin: f64, pass: bool) {
        if !pass {
            self.failures += 1;
        }
        self.checks.push(CheckRecord { check: check.to_string(), inputs, lhs, rhs, margin, pass });
    }

    /// Records a measured (never-failing) quantity.
    pub(crate) fn report(&mut self, check: &str, inputs: String, lhs: f64, rhs: f64) {
        self.checks.push(CheckRecord {
            check: check.to_string(),
            inputs,
            lhs,
            rhs,
            margin: rhs - lhs,
            pass: true,
        });
    }

    /// Records a skipped degenerate instance.
    pub(crate) fn skip(&mut self, check: &str, inputs: String) {
        self.skips += 1;
        self.checks.push(CheckRecord {
            check: format!("{check} [skipped]"),
            inputs,
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            pass: true,
        });
    }

    pub(crate) fn track_constant(&mut self, c: f64) {
        let cur = self.max_constant.unwrap_or(f64::NEG_INFINITY);
        if c > cur {
            self.max_constant = Some(c);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
