//! Prime sweeps: JSON-configured batch measurements of the interval
//! constructions, emitted as CSV with a fixed schema and byte-identical
//! output for identical configs.

use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::{primes_in, sample_evenly, HarnessError, SplitMix64};
use crate::constructions::{
    default_targets, inverse_closed_sumfree, middle_third, multi_avoider_with_density,
    one_avoider, Density,
};
use crate::field::{is_prime_u64, FieldCtx};
use crate::set::{additive_energy, fast_missing_elements, multiplicative_energy, FpSet};
use crate::constructions::is_sumfree;

/// Sweep configuration, deserialized strictly from JSON: unknown fields
/// are rejected so config typos surface as errors instead of silently
/// running a different experiment.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub primes: PrimeSpec,
    /// Thin the prime list down to this many: evenly spaced without a
    /// seed, a seeded uniform sample (ascending) with one.
    #[serde(default)]
    pub sample: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Construction per prime: "theorem3" (single-target interval
    /// avoider), "theorem3k" (k-target avoider), "midthird" (the middle
    /// third interval), or "invclosed" (its inverse-closed sum-free core).
    pub kind: String,
    /// Density for the avoider kinds, e.g. "1/4" or "0.25"; defaults to
    /// 1/4 for theorem3 and 1/(4k) for theorem3k.
    #[serde(default)]
    pub c: Option<String>,
    /// Number of targets for theorem3k (default 1).
    #[serde(default)]
    pub k: Option<usize>,
    /// Explicit targets for theorem3k (default: powers of the least
    /// primitive root).
    #[serde(default)]
    pub targets: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeSpec {
    /// Inclusive range [lo, hi] sieved for primes.
    #[serde(default)]
    pub range: Option<[u64; 2]>,
    /// Explicit prime list (each entry must be an odd prime).
    #[serde(default)]
    pub list: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Theorem3,
    Theorem3K,
    MidThird,
    InvClosed,
}

impl Kind {
    fn parse(token: &str) -> Result<Kind, HarnessError> {
        match token {
            "theorem3" => Ok(Kind::Theorem3),
            "theorem3k" => Ok(Kind::Theorem3K),
            "midthird" => Ok(Kind::MidThird),
            "invclosed" => Ok(Kind::InvClosed),
            other => Err(HarnessError::ConfigError(format!(
                "unknown kind {other:?} (expected theorem3, theorem3k, midthird, or invclosed)"
            ))),
        }
    }
}

/// Fixed column order of the sweep CSV.
pub const SWEEP_HEADER: &str = "p,kind,c,k,size,density,missing,sumfree,inverse_closed,\
additive_energy,multiplicative_energy,eplus_ratio,set";

/// Floats in the CSV carry 12 significant digits in scientific notation,
/// which round-trips f64 for every quantity the sweep emits.
fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

/// RFC-4180 field quoting: wrap in double quotes, doubling any interior
/// quotes. Applied to the set column, which contains commas.
fn quote(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

fn resolve_primes(config: &SweepConfig) -> Result<Vec<u64>, HarnessError> {
    let primes = match (&config.primes.range, &config.primes.list) {
        (Some(_), Some(_)) => {
            return Err(HarnessError::ConfigError(
                "primes.range and primes.list are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(HarnessError::ConfigError(
                "primes needs either a range or a list".into(),
            ))
        }
        (&Some([lo, hi]), None) => {
            if lo > hi {
                return Err(HarnessError::ConfigError(format!(
                    "empty prime range [{lo}, {hi}]"
                )));
            }
            primes_in(lo.max(3), hi)
        }
        (None, Some(list)) => {
            let mut v = Vec::with_capacity(list.len());
            for &p in list {
                if p < 3 || !is_prime_u64(p) {
                    return Err(HarnessError::ConfigError(format!(
                        "{p} is not an odd prime"
                    )));
                }
                v.push(p);
            }
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    let primes = match config.sample {
        None => primes,
        Some(0) => {
            return Err(HarnessError::ConfigError("sample must be at least 1".into()))
        }
        Some(want) if want >= primes.len() => primes,
        Some(want) => match config.seed {
            None => sample_evenly(&primes, want),
            Some(seed) => {
                let mut rng = SplitMix64::new(seed);
                let mut idx: Vec<usize> = (0..primes.len()).collect();
                for i in 0..want {
                    let j = i + rng.below((idx.len() - i) as u64) as usize;
                    idx.swap(i, j);
                }
                let mut chosen: Vec<u64> = idx[..want].iter().map(|&i| primes[i]).collect();
                chosen.sort_unstable();
                chosen
            }
        },
    };
    if primes.is_empty() {
        return Err(HarnessError::ConfigError("no primes selected".into()));
    }
    Ok(primes)
}

fn reject_field(cond: bool, field: &str, kind: &str) -> Result<(), HarnessError> {
    if cond {
        Err(HarnessError::ConfigError(format!(
            "field {field:?} is not valid for kind {kind:?}"
        )))
    } else {
        Ok(())
    }
}

/// Runs the sweep and returns the full CSV (header + one row per prime,
/// LF line endings, trailing newline). Set literals longer than 64
/// elements are replaced by `sha256:<hex>` of the literal bytes.
pub fn run_sweep(config: &SweepConfig) -> Result<String, HarnessError> {
    let kind = Kind::parse(&config.kind)?;
    match kind {
        Kind::Theorem3 => {
            reject_field(config.k.is_some(), "k", &config.kind)?;
            reject_field(config.targets.is_some(), "targets", &config.kind)?;
        }
        Kind::Theorem3K => {}
        Kind::MidThird | Kind::InvClosed => {
            reject_field(config.c.is_some(), "c", &config.kind)?;
            reject_field(config.k.is_some(), "k", &config.kind)?;
            reject_field(config.targets.is_some(), "targets", &config.kind)?;
        }
    }
    let density = match &config.c {
        None => None,
        Some(text) => Some(
            text.parse::<Density>()
                .and_then(Density::validate)
                .map_err(|e| HarnessError::ConfigError(format!("bad density {text:?}: {e}")))?,
        ),
    };
    let k = config.k.unwrap_or(1);
    if kind == Kind::Theorem3K {
        if k == 0 {
            return Err(HarnessError::ConfigError("k must be at least 1".into()));
        }
        if let Some(t) = &config.targets {
            if t.len() != k {
                return Err(HarnessError::ConfigError(format!(
                    "expected {k} targets, got {}",
                    t.len()
                )));
            }
        }
    }
    let primes = resolve_primes(config)?;

    let mut out = String::with_capacity(64 * (primes.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for &p in &primes {
        let (set, c_col, k_col) = match kind {
            Kind::Theorem3 => {
                let c = density.unwrap_or(Density::Ratio(1, 4));
                (one_avoider(p, c)?.set, fmt12(c.as_f64()), String::new())
            }
            Kind::Theorem3K => {
                let c = density.unwrap_or(Density::Ratio(1, 4 * k as u64));
                let targets = match &config.targets {
                    Some(t) => t.clone(),
                    None => default_targets(p, k)?,
                };
                (
                    multi_avoider_with_density(p, &targets, c)?.set,
                    fmt12(c.as_f64()),
                    k.to_string(),
                )
            }
            Kind::MidThird => (middle_third(p)?, String::new(), String::new()),
            Kind::InvClosed => (inverse_closed_sumfree(p)?, String::new(), String::new()),
        };
        out.push_str(&sweep_row(p, &config.kind, &c_col, &k_col, &set)?);
        out.push('\n');
    }
    Ok(out)
}

fn sweep_row(
    p: u64,
    kind: &str,
    c_col: &str,
    k_col: &str,
    set: &FpSet,
) -> Result<String, HarnessError> {
    let size = set.card();
    let density = fmt12(size as f64 / p as f64);
    let missing = if set.is_empty() {
        p - 1
    } else {
        let ctx = FieldCtx::new(p)?;
        fast_missing_elements(&ctx, set)?.card() as u64
    };
    let sumfree = is_sumfree(set);
    let inverse_closed = !set.contains(0) && *set == set.inverse_set()?;
    let eplus = additive_energy(set);
    let emult = multiplicative_energy(set);
    let eplus_ratio = if size == 0 {
        String::new()
    } else {
        fmt12(eplus as f64 / (size as f64).powi(3))
    };
    let literal = set.to_literal();
    let set_col = if size > 64 {
        format!("sha256:{:x}", Sha256::digest(literal.as_bytes()))
    } else {
        literal
    };
    Ok(format!(
        "{p},{kind},{c_col},{k_col},{size},{density},{missing},{sumfree},{inverse_closed},{eplus},{emult},{eplus_ratio},{set}",
        set = quote(&set_col)
    ))
}
