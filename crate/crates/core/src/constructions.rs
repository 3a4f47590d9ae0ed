//! Explicit families of sets whose product of sums A(A+A) provably misses
//! prescribed nonzero targets, plus the closed-form density thresholds of
//! the covering direction.
//!
//! The avoider construction starts from an initial interval P = {1..⌈cp⌉}
//! and removes the inverses of pair sums scaled by each target:
//! A = P ∖ ∪_j x_j·(P+P)⁻¹. If some x_j were a(b+c) with a, b, c ∈ A, then
//! a = x_j·(b+c)⁻¹ would have been removed — so every x_j ∉ A(A+A), a
//! purely combinatorial fact the constructors re-verify exactly with bitset
//! membership. With c < 1/2 the sums P+P never wrap past p, so the removed
//! inverses are well-defined.
//!
//! The sum-free side takes the open middle-third interval
//! I = {r : p/3 < r < 2p/3} (cardinality exactly ⌊(p+1)/3⌋) and its
//! inverse-closed core A = I ∩ I⁻¹ (empirically ≈ p/9 elements), which is
//! sum-free, closed under inversion, and therefore has 1 ∉ A(A+A).

use crate::field::{is_prime_u64, mul_mod, pow_mod, FieldCtx};
use crate::set::{FpSet, SetError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstructError {
    #[error("bad interval [{lo}, {hi}] for modulus {p}: need 0 ≤ lo ≤ hi < p")]
    BadRange { lo: u64, hi: u64, p: u64 },
    #[error("bad density {0}: need 0 < c < 1/2")]
    BadDensity(String),
    #[error("avoided targets must be distinct")]
    DuplicateTargets,
    #[error("avoided targets must be nonzero")]
    ZeroTarget,
    #[error("need at least one avoided target")]
    ZeroK,
    #[error("expected {expected} targets, got {got}")]
    BadTargetCount { expected: usize, got: usize },
    #[error("modulus {0} too small for this construction")]
    TooSmall(u64),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// A set density 0 < c < 1/2, either an exact rational or a float.
/// Rationals give exact interval lengths ⌈np/d⌉; floats are documented as
/// ⌈c·p⌉ computed after a −1e−12 nudge so that exactly-representable
/// products round predictably.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Ratio(u64, u64),
    Float(f64),
}

impl Density {
    pub fn validate(self) -> Result<Self, ConstructError> {
        let ok = match self {
            Density::Ratio(n, d) => n > 0 && d > 0 && 2 * n < d,
            Density::Float(c) => c > 0.0 && c < 0.5,
        };
        if ok {
            Ok(self)
        } else {
            Err(ConstructError::BadDensity(self.to_string()))
        }
    }

    /// ⌈c·p⌉.
    pub fn ceil_mul(self, p: u64) -> u64 {
        match self {
            Density::Ratio(n, d) => {
                (((n as u128) * (p as u128)).div_ceil(d as u128)) as u64
            }
            Density::Float(c) => (c * p as f64 - 1e-12).ceil() as u64,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Density::Ratio(n, d) => n as f64 / d as f64,
            Density::Float(c) => c,
        }
    }
}

impl std::fmt::Display for Density {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Density::Ratio(n, d) => write!(f, "{n}/{d}"),
            Density::Float(c) => write!(f, "{c}"),
        }
    }
}

impl std::str::FromStr for Density {
    type Err = ConstructError;

    /// Parses "1/4" (exact rational) or "0.25" (float).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConstructError::BadDensity(s.to_string());
        let d = if let Some((n, den)) = s.split_once('/') {
            Density::Ratio(
                n.trim().parse().map_err(|_| bad())?,
                den.trim().parse().map_err(|_| bad())?,
            )
        } else {
            Density::Float(s.trim().parse().map_err(|_| bad())?)
        };
        d.validate()
    }
}

/// The interval {lo..hi} (inclusive) as a set of residues.
pub fn interval_set(p: u64, lo: u64, hi: u64) -> Result<FpSet, ConstructError> {
    if lo > hi || hi >= p {
        return Err(ConstructError::BadRange { lo, hi, p });
    }
    let elems: Vec<u64> = (lo..=hi).collect();
    Ok(FpSet::from_elems(p, &elems)?)
}

/// An avoider set with its construction audit trail.
#[derive(Debug, Clone)]
pub struct Construction {
    /// The constructed set A.
    pub set: FpSet,
    /// |P| = ⌈cp⌉, the size of the initial interval.
    pub base_size: usize,
    /// |P ∩ ∪_j x_j·(P+P)⁻¹|, the number of removed elements.
    pub overlap: usize,
    /// The nonzero targets verified absent from A(A+A).
    pub targets: Vec<u64>,
}

/// A = P ∖ (P+P)⁻¹ with P = {1..⌈cp⌉}: a positive-density set with
/// 1 ∉ A(A+A), re-verified exactly before returning.
pub fn one_avoider(p: u64, c: Density) -> Result<Construction, ConstructError> {
    multi_avoider_with_density(p, &[1], c)
}

/// A = P ∖ ∪_j x_j·(P+P)⁻¹ with the density tuned to c = 1/(4k): misses
/// all k targets at once. Defaults to targets {1, g, g², …} (powers of the
/// least primitive root) when none are given.
pub fn multi_avoider(
    p: u64,
    k: usize,
    targets: Option<Vec<u64>>,
) -> Result<Construction, ConstructError> {
    if k == 0 {
        return Err(ConstructError::ZeroK);
    }
    let targets = match targets {
        Some(t) => {
            if t.len() != k {
                return Err(ConstructError::BadTargetCount { expected: k, got: t.len() });
            }
            t
        }
        None => default_targets(p, k)?,
    };
    multi_avoider_with_density(p, &targets, Density::Ratio(1, 4 * k as u64))
}

/// The default target list {1, g, g², …, g^(k−1)} (powers of the least
/// primitive root) used by [`multi_avoider`] when no targets are given.
pub fn default_targets(p: u64, k: usize) -> Result<Vec<u64>, ConstructError> {
    if k == 0 {
        return Err(ConstructError::ZeroK);
    }
    if k as u64 >= p {
        return Err(ConstructError::DuplicateTargets);
    }
    if !is_prime_u64(p) {
        return Err(SetError::CompositeModulus(p).into());
    }
    let ctx = FieldCtx::new(p).map_err(|_| SetError::CompositeModulus(p))?;
    let g = ctx.generator();
    let mut t = Vec::with_capacity(k);
    let mut x = 1u64;
    for _ in 0..k {
        t.push(x);
        x = mul_mod(x, g, p);
    }
    Ok(t)
}

/// The general avoider: explicit targets and explicit density.
pub fn multi_avoider_with_density(
    p: u64,
    targets: &[u64],
    c: Density,
) -> Result<Construction, ConstructError> {
    if targets.is_empty() {
        return Err(ConstructError::ZeroK);
    }
    let c = c.validate()?;
    let mut seen = FpSet::empty(p)?;
    for &x in targets {
        if x % p == 0 {
            return Err(ConstructError::ZeroTarget);
        }
        if seen.contains(x % p) {
            return Err(ConstructError::DuplicateTargets);
        }
        seen.insert(x % p)?;
    }
    let len = c.ceil_mul(p).max(1).min(p - 1);
    let base = interval_set(p, 1, len)?;
    // With c < 1/2 the sums stay in {2..2⌈cp⌉} ⊆ {2..p−1}: no wrap, no zero.
    let sums = base.sumset(&base)?;
    let mut removed = FpSet::empty(p)?;
    for s in sums.iter() {
        debug_assert!(s != 0, "pair sums cannot vanish at density < 1/2");
        let s_inv = pow_mod(s, p - 2, p);
        for &x in targets {
            removed.insert(mul_mod(x % p, s_inv, p))?;
        }
    }
    let set = base.difference(&removed)?;
    let overlap = base.card() - set.card();
    // Re-verify the defining property exactly; it is a theorem, so failure
    // here means an implementation bug.
    for &x in targets {
        assert!(
            set.is_empty() || set.avoids_target(x % p)?,
            "avoider failed to avoid target {x} at p={p}"
        );
    }
    Ok(Construction {
        set,
        base_size: base.card(),
        overlap,
        targets: targets.iter().map(|&x| x % p).collect(),
    })
}

/// The open middle-third interval I = {r : p/3 < r < 2p/3}, which is
/// sum-free in F_p; |I| = ⌊(p+1)/3⌋ exactly.
pub fn middle_third(p: u64) -> Result<FpSet, ConstructError> {
    if p <= 3 {
        return Err(ConstructError::TooSmall(p));
    }
    if !is_prime_u64(p) {
        return Err(SetError::CompositeModulus(p).into());
    }
    let lo = p / 3 + 1;
    let hi = (2 * p).div_ceil(3) - 1;
    let set = interval_set(p, lo, hi)?;
    debug_assert_eq!(set.card() as u64, (p + 1) / 3, "middle-third cardinality at p={p}");
    Ok(set)
}

/// A = I ∩ I⁻¹ for the middle third I: inverse-closed, sum-free, and
/// (when nonempty) 1 ∉ A(A+A). All three properties are re-verified
/// exactly. May be empty for small p.
pub fn inverse_closed_sumfree(p: u64) -> Result<FpSet, ConstructError> {
    let i = middle_third(p)?;
    let set = i.intersection(&i.inverse_set()?)?;
    assert_eq!(set, set.inverse_set()?, "inverse closure failed at p={p}");
    assert!(is_sumfree(&set), "sum-freeness failed at p={p}");
    if !set.is_empty() {
        assert!(set.avoids_target(1)?, "1 ∈ A(A+A) for inverse-closed core at p={p}");
    }
    Ok(set)
}

/// True iff (A+A) ∩ A = ∅ (sums taken in F_p).
pub fn is_sumfree(a: &FpSet) -> bool {
    if a.is_empty() {
        return true;
    }
    let sums = a.sumset(a).expect("same field");
    !sums.intersects(a).expect("same field")
}

/// Closed-form thresholds of the covering direction: the expansion profile
/// f(α), the density where the three-step covering argument takes over,
/// the root of the final cubic, and the cited record threshold.
#[derive(Debug, Clone, Copy)]
pub struct CoverageThresholds {
    /// Root of (11−6√2)α³ − (22−6√2)α² + 17α − 4 in (0, 1/2), ≈ 0.305091.
    pub cubic_root: f64,
    /// (7 − √(9+24√2)) / (10 − 6√2) ≈ 0.295138.
    pub c1_threshold: f64,
    /// The external record density 0.30065 used for comparison.
    pub lev_threshold: f64,
}

impl CoverageThresholds {
    /// f(α) = (1 + (√2−1)α)·α / (2(1−α)): the guaranteed density of A+A
    /// relative to p given |A| = αp in the covering argument.
    pub fn f(&self, alpha: f64) -> f64 {
        (1.0 + (std::f64::consts::SQRT_2 - 1.0) * alpha) * alpha / (2.0 * (1.0 - alpha))
    }
}

/// Evaluates the cubic (11−6√2)α³ − (22−6√2)α² + 17α − 4, whose root in
/// (0, 1/2) is the covering threshold `cubic_root`.
pub fn coverage_cubic(alpha: f64) -> f64 {
    let s = 6.0 * std::f64::consts::SQRT_2;
    (11.0 - s) * alpha.powi(3) - (22.0 - s) * alpha.powi(2) + 17.0 * alpha - 4.0
}

/// Computes the threshold constants; the cubic root is found by bisection
/// on [0, 1/2] to 1e−9 and asserted to satisfy the cubic to 1e−8.
pub fn coverage_thresholds() -> CoverageThresholds {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    debug_assert!(coverage_cubic(lo) < 0.0 && coverage_cubic(hi) > 0.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if coverage_cubic(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let cubic_root = 0.5 * (lo + hi);
    assert!(coverage_cubic(cubic_root).abs() < 1e-8);
    let c1_threshold =
        (7.0 - (9.0 + 24.0 * std::f64::consts::SQRT_2).sqrt()) / (10.0 - 6.0 * std::f64::consts::SQRT_2);
    CoverageThresholds { cubic_root, c1_threshold, lev_threshold: 0.30065 }
}
