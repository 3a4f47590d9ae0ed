//! Residue subsets of F_p and their additive/multiplicative algebra.
//!
//! [`FpSet`] is a bit set over residues 0..p with p validated prime. The
//! operations mirror the quantities that drive product-of-sumset expansion:
//!
//! - sumset A+B (word-parallel union of cyclic shifts, O(p·min|A|,|B|/64)),
//! - product set AB, dilates rA, inverse sets A⁻¹,
//! - A(A+A) = {a(b+c)} and its missing elements in F_p∖{0},
//! - representation counts r₁(y) = #{y = x·a⁻¹ − b}, r₂(y) = #{y = x(c+d)⁻¹},
//!   ρ(w) = #{w = x(y+z)} over triples from A,
//! - additive energy E⁺(A) = #{a−b = c−d} and multiplicative energy
//!   E×(A) = #{ab = cd} (ordered quadruples),
//! - the popular-difference set S = {s ∈ A−A : |A∩(A+s)| > (1−ε−p^(−1/3))|A|}
//!   where E⁺ = (1−ε)|A|³, with membership decided by exact integer
//!   arithmetic (cubing both sides to clear the p^(−1/3)).
//!
//! Counts are exact integers throughout; no floating point is involved
//! except in reported ratios.

use crate::bits::BitBuf;
use crate::field::{is_prime_u64, mul_mod, pow_mod, FieldCtx};
use num_bigint::{BigInt, BigUint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("modulus {0} out of supported range [3, 2^62)")]
    ModulusOutOfRange(u64),
    #[error("element {x} is not a residue mod {p}")]
    ElementOutOfRange { x: u64, p: u64 },
    #[error("sets live in different fields: F_{left} vs F_{right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("operation requires 0 ∉ A")]
    ZeroInSet,
    #[error("dilation by zero collapses the set")]
    ZeroDilation,
    #[error("target must be nonzero")]
    ZeroTarget,
    #[error("operation undefined on the empty set")]
    EmptySet,
    #[error("unparseable set literal: {0}")]
    BadLiteral(String),
}

/// A subset of F_p (p prime), stored as a p-bit set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpSet {
    p: u64,
    bits: BitBuf,
}

fn check_modulus(p: u64) -> Result<(), SetError> {
    if !(3..(1 << 62)).contains(&p) {
        return Err(SetError::ModulusOutOfRange(p));
    }
    if !is_prime_u64(p) {
        return Err(SetError::CompositeModulus(p));
    }
    Ok(())
}

impl FpSet {
    pub fn empty(p: u64) -> Result<Self, SetError> {
        check_modulus(p)?;
        Ok(FpSet { p, bits: BitBuf::new(p as usize) })
    }

    /// All of F_p∖{0}.
    pub fn full_nonzero(p: u64) -> Result<Self, SetError> {
        let mut s = Self::empty(p)?;
        for x in 1..p {
            s.bits.set(x as usize);
        }
        Ok(s)
    }

    pub fn from_elems(p: u64, elems: &[u64]) -> Result<Self, SetError> {
        let mut s = Self::empty(p)?;
        for &x in elems {
            if x >= p {
                return Err(SetError::ElementOutOfRange { x, p });
            }
            s.bits.set(x as usize);
        }
        Ok(s)
    }

    /// Parses either a comma-separated residue list ("1,2,5"; empty string is
    /// the empty set) or a little-endian hex bitmap ("0x6" = {1,2}, bit i
    /// standing for residue i).
    pub fn parse(p: u64, literal: &str) -> Result<Self, SetError> {
        let lit = literal.trim();
        if let Some(hex) = lit.strip_prefix("0x").or_else(|| lit.strip_prefix("0X")) {
            if hex.is_empty() || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
                return Err(SetError::BadLiteral(literal.into()));
            }
            let mut s = Self::empty(p)?;
            for (j, c) in hex.chars().rev().enumerate() {
                let nib = c.to_digit(16).unwrap() as u64;
                for b in 0..4 {
                    if nib >> b & 1 == 1 {
                        let x = 4 * j as u64 + b;
                        if x >= p {
                            return Err(SetError::ElementOutOfRange { x, p });
                        }
                        s.bits.set(x as usize);
                    }
                }
            }
            return Ok(s);
        }
        if lit.is_empty() {
            return Self::empty(p);
        }
        let elems: Result<Vec<u64>, _> = lit
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| SetError::BadLiteral(literal.into())))
            .collect();
        Self::from_elems(p, &elems?)
    }

    /// Comma-separated residue literal (ascending order).
    pub fn to_literal(&self) -> String {
        let v: Vec<String> = self.iter().map(|x| x.to_string()).collect();
        v.join(",")
    }

    /// Little-endian hex bitmap literal ("0x…", bit i = residue i).
    pub fn to_hex(&self) -> String {
        let mut nibbles = vec![0u8; (self.p as usize).div_ceil(4)];
        for x in self.iter() {
            nibbles[(x / 4) as usize] |= 1 << (x % 4);
        }
        while nibbles.len() > 1 && *nibbles.last().unwrap() == 0 {
            nibbles.pop();
        }
        let mut s = String::from("0x");
        for nib in nibbles.iter().rev() {
            s.push(char::from_digit(*nib as u32, 16).unwrap());
        }
        s
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        x < self.p && self.bits.get(x as usize)
    }

    pub fn card(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn insert(&mut self, x: u64) -> Result<(), SetError> {
        if x >= self.p {
            return Err(SetError::ElementOutOfRange { x, p: self.p });
        }
        self.bits.set(x as usize);
        Ok(())
    }

    pub fn remove(&mut self, x: u64) {
        if x < self.p {
            self.bits.clear(x as usize);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones().map(|i| i as u64)
    }

    pub fn elems(&self) -> Vec<u64> {
        self.iter().collect()
    }

    fn same_field(&self, other: &FpSet) -> Result<(), SetError> {
        if self.p != other.p {
            return Err(SetError::ModulusMismatch { left: self.p, right: other.p });
        }
        Ok(())
    }

    pub fn union(&self, other: &FpSet) -> Result<FpSet, SetError> {
        self.same_field(other)?;
        let mut out = self.clone();
        out.bits.or_assign(&other.bits);
        Ok(out)
    }

    pub fn intersection(&self, other: &FpSet) -> Result<FpSet, SetError> {
        self.same_field(other)?;
        let mut out = self.clone();
        out.bits.and_assign(&other.bits);
        Ok(out)
    }

    pub fn difference(&self, other: &FpSet) -> Result<FpSet, SetError> {
        self.same_field(other)?;
        let mut out = self.clone();
        out.bits.and_not_assign(&other.bits);
        Ok(out)
    }

    pub fn intersects(&self, other: &FpSet) -> Result<bool, SetError> {
        self.same_field(other)?;
        Ok(self.bits.intersects(&other.bits))
    }

    /// (F_p ∖ {0}) ∖ A.
    pub fn complement_nonzero(&self) -> FpSet {
        let mut out = self.clone();
        out.bits.not_in_place();
        if out.p > 0 {
            out.bits.clear(0);
        }
        out
    }

    /// Sumset A+B = {a+b mod p} as a union of cyclic shifts of the larger
    /// operand: O(p·min(|A|,|B|)/64) word operations.
    pub fn sumset(&self, other: &FpSet) -> Result<FpSet, SetError> {
        self.same_field(other)?;
        let (small, large) =
            if self.card() <= other.card() { (self, other) } else { (other, self) };
        let mut out = FpSet { p: self.p, bits: BitBuf::new(self.p as usize) };
        for a in small.iter() {
            out.bits.or_rotated(&large.bits, a as usize);
        }
        Ok(out)
    }

    /// Translate A+c = {a+c}: one cyclic shift.
    pub fn translate(&self, c: u64) -> FpSet {
        let mut out = FpSet { p: self.p, bits: BitBuf::new(self.p as usize) };
        out.bits.or_rotated(&self.bits, (c % self.p) as usize);
        out
    }

    /// −A = {−a}.
    pub fn negate(&self) -> FpSet {
        let mut out = FpSet { p: self.p, bits: BitBuf::new(self.p as usize) };
        for a in self.iter() {
            out.bits.set(if a == 0 { 0 } else { (self.p - a) as usize });
        }
        out
    }

    /// Dilate cA = {c·a} for c ≠ 0 (a bijection on residues).
    pub fn dilate(&self, c: u64) -> Result<FpSet, SetError> {
        if c.is_multiple_of(self.p) {
            return Err(SetError::ZeroDilation);
        }
        let mut out = FpSet { p: self.p, bits: BitBuf::new(self.p as usize) };
        for a in self.iter() {
            out.bits.set(mul_mod(c, a, self.p) as usize);
        }
        Ok(out)
    }

    /// Product set AB = {a·b}. Exact but quadratic; see
    /// [`fast_product_set`] for the dlog-domain path used at scale.
    pub fn product_set(&self, other: &FpSet) -> Result<FpSet, SetError> {
        self.same_field(other)?;
        let mut out = FpSet { p: self.p, bits: BitBuf::new(self.p as usize) };
        for a in self.iter() {
            for b in other.iter() {
                out.bits.set(mul_mod(a, b, self.p) as usize);
            }
        }
        Ok(out)
    }

    /// A⁻¹ = {a⁻¹ : a ∈ A}; errors if 0 ∈ A.
    pub fn inverse_set(&self) -> Result<FpSet, SetError> {
        if self.contains(0) {
            return Err(SetError::ZeroInSet);
        }
        let mut out = FpSet { p: self.p, bits: BitBuf::new(self.p as usize) };
        for a in self.iter() {
            out.bits.set(pow_mod(a, self.p - 2, self.p) as usize);
        }
        Ok(out)
    }

    /// A(A+A) = {a(b+c) : a,b,c ∈ A}.
    pub fn a_aplusa(&self) -> FpSet {
        let sums = self.sumset(self).expect("same field");
        self.product_set(&sums).expect("same field")
    }

    /// (F_p∖{0}) ∖ A(A+A): the nonzero values the product of sums misses.
    pub fn missing_elements(&self) -> FpSet {
        self.a_aplusa().complement_nonzero()
    }

    /// True iff x ∉ A(A+A), decided without materializing the product set:
    /// x = a·s with s ∈ A+A iff s = x·a⁻¹ for some a ∈ A∖{0}.
    pub fn avoids_target(&self, x: u64) -> Result<bool, SetError> {
        if x.is_multiple_of(self.p) {
            return Err(SetError::ZeroTarget);
        }
        let sums = self.sumset(self).expect("same field");
        for a in self.iter() {
            if a == 0 {
                continue; // 0·s = 0 ≠ x
            }
            let s = mul_mod(x, pow_mod(a, self.p - 2, self.p), self.p);
            if sums.contains(s) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A ∩ (A+s): the difference-s slice whose size is |A_s| in
    /// E⁺(A) = Σ_s |A_s|².
    pub fn intersect_shifted(&self, s: u64) -> FpSet {
        let shifted = self.translate(s);
        self.intersection(&shifted).expect("same field")
    }

    /// Recognizes arithmetic progressions: returns (start, step, len) such
    /// that A = {start + j·step : 0 ≤ j < len} when A is one, else None.
    /// Sets of size ≤ 2 and the empty set are trivially progressions.
    pub fn as_progression(&self) -> Option<Progression> {
        let elems = self.elems();
        let m = elems.len();
        match m {
            0 => return Some(Progression { start: 0, step: 1, len: 0 }),
            1 => return Some(Progression { start: elems[0], step: 1, len: 1 }),
            2 => {
                let step = (elems[1] + self.p - elems[0]) % self.p;
                return Some(Progression { start: elems[0], step, len: 2 });
            }
            _ => {}
        }
        let x0 = elems[0];
        for &x in &elems[1..] {
            let d = (x + self.p - x0) % self.p;
            // Walk backwards from x0 to find the start, then forwards.
            let mut start = x0;
            let mut back = 0usize;
            while back < m {
                let prev = (start + self.p - d) % self.p;
                if prev == x0 || !self.contains(prev) {
                    break; // full cycle or front found
                }
                start = prev;
                back += 1;
            }
            let mut cur = start;
            let mut count = 1usize;
            while count < m {
                cur = (cur + d) % self.p;
                if !self.contains(cur) {
                    break;
                }
                count += 1;
            }
            if count == m {
                return Some(Progression { start, step: d, len: m });
            }
        }
        None
    }
}

/// An arithmetic progression {start + j·step mod p : 0 ≤ j < len}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progression {
    pub start: u64,
    pub step: u64,
    pub len: usize,
}

impl std::fmt::Debug for FpSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FpSet(p={}, {{{}}})", self.p, self.to_literal())
    }
}

impl std::fmt::Display for FpSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_literal())
    }
}

// ---------------------------------------------------------------------------
// Representation counts
// ---------------------------------------------------------------------------

/// Exact counts of representations, indexed by residue.
#[derive(Clone, PartialEq, Eq)]
pub struct RepCounts {
    p: u64,
    counts: Vec<u64>,
}

impl RepCounts {
    fn new(p: u64) -> Self {
        RepCounts { p, counts: vec![0; p as usize] }
    }

    #[inline]
    pub fn get(&self, y: u64) -> u64 {
        self.counts[(y % self.p) as usize]
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Σ over nonzero residues.
    pub fn total_nonzero(&self) -> u128 {
        self.counts[1..].iter().map(|&c| c as u128).sum()
    }

    /// Σ_{w≠0} count(w)².
    pub fn second_moment_nonzero(&self) -> u128 {
        self.counts[1..].iter().map(|&c| (c as u128) * (c as u128)).sum()
    }

    /// Number of nonzero residues with count > 0.
    pub fn support_nonzero(&self) -> usize {
        self.counts[1..].iter().filter(|&&c| c > 0).count()
    }

    pub fn iter_nonzero_counts(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(w, &c)| (w as u64, c))
    }
}

impl std::fmt::Debug for RepCounts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RepCounts(p={}, {:?})", self.p, self.iter_nonzero_counts().collect::<Vec<_>>())
    }
}

/// r₁(y) = #{(a,b) ∈ A² : y = x·a⁻¹ − b}. Requires x ≠ 0 and 0 ∉ A.
/// Σ_y r₁(y) = |A|².
pub fn rep_r1(set: &FpSet, x: u64) -> Result<RepCounts, SetError> {
    let p = set.p();
    if x.is_multiple_of(p) {
        return Err(SetError::ZeroTarget);
    }
    if set.contains(0) {
        return Err(SetError::ZeroInSet);
    }
    let mut out = RepCounts::new(p);
    for a in set.iter() {
        let t = mul_mod(x, pow_mod(a, p - 2, p), p);
        for b in set.iter() {
            let y = (t + p - b) % p;
            out.counts[y as usize] += 1;
        }
    }
    Ok(out)
}

/// r₂(y) = #{(c,d) ∈ A² : c+d ≠ 0, y = x·(c+d)⁻¹} for x ≠ 0 (ordered pairs).
/// Σ_y r₂(y) = |A|² − #{(c,d) : c+d = 0}.
pub fn rep_r2(set: &FpSet, x: u64) -> Result<RepCounts, SetError> {
    let p = set.p();
    if x.is_multiple_of(p) {
        return Err(SetError::ZeroTarget);
    }
    let sums = pair_sum_counts(set);
    let mut out = RepCounts::new(p);
    for (s, n) in sums.iter().enumerate().skip(1) {
        if *n > 0 {
            let y = mul_mod(x, pow_mod(s as u64, p - 2, p), p);
            out.counts[y as usize] += *n;
        }
    }
    Ok(out)
}

/// ρ(w) = #{(x,y,z) ∈ A³ : w = x(y+z)} for every residue w.
/// Σ_w ρ(w) = |A|³ exactly.
pub fn rep_rho(set: &FpSet) -> RepCounts {
    let p = set.p();
    let sums = pair_sum_counts(set);
    let mut out = RepCounts::new(p);
    for x in set.iter() {
        for (s, n) in sums.iter().enumerate() {
            if *n > 0 {
                out.counts[mul_mod(x, s as u64, p) as usize] += *n;
            }
        }
    }
    out
}

/// Counts of ordered pair sums: result[s] = #{(a,b) ∈ A² : a+b = s}.
fn pair_sum_counts(set: &FpSet) -> Vec<u64> {
    let p = set.p();
    let elems = set.elems();
    let mut n = vec![0u64; p as usize];
    for &a in &elems {
        for &b in &elems {
            let s = a + b;
            let s = if s >= p { s - p } else { s };
            n[s as usize] += 1;
        }
    }
    n
}

/// Counts of ordered pair differences: result[s] = |A ∩ (A+s)|.
fn pair_diff_counts(set: &FpSet) -> Vec<u64> {
    let p = set.p();
    let elems = set.elems();
    let mut n = vec![0u64; p as usize];
    for &a in &elems {
        for &b in &elems {
            n[((a + p - b) % p) as usize] += 1;
        }
    }
    n
}

/// Additive energy E⁺(A) = #{(a,b,c,d) ∈ A⁴ : a−b = c−d} = Σ_s |A_s|²
/// (ordered quadruples).
pub fn additive_energy(set: &FpSet) -> u128 {
    pair_diff_counts(set).iter().map(|&c| (c as u128) * (c as u128)).sum()
}

/// Multiplicative energy E×(A) = #{(a,b,c,d) ∈ A⁴ : ab = cd}
/// (ordered quadruples).
pub fn multiplicative_energy(set: &FpSet) -> u128 {
    let p = set.p();
    let elems = set.elems();
    let mut n = vec![0u64; p as usize];
    for &a in &elems {
        for &b in &elems {
            n[mul_mod(a, b, p) as usize] += 1;
        }
    }
    n.iter().map(|&c| (c as u128) * (c as u128)).sum()
}

// ---------------------------------------------------------------------------
// Popular differences
// ---------------------------------------------------------------------------

/// The popular-difference structure of a set: with E⁺(A) = (1−ε)|A|³,
/// S = {s ∈ A−A : |A∩(A+s)| > (1−ε−p^(−1/3))|A|}.
#[derive(Debug, Clone)]
pub struct PopularDiffs {
    /// ε = 1 − E⁺/|A|³.
    pub epsilon: f64,
    pub additive_energy: u128,
    /// The popularity threshold (1−ε−p^(−1/3))·|A|, for reporting.
    pub threshold: f64,
    /// The popular-difference set S.
    pub set: FpSet,
    /// Exact check of |S| ≥ |A|·p^(−1/3), i.e. |S|³·p ≥ |A|³ in integers.
    pub lower_bound_ok: bool,
}

/// Computes the popular-difference set with exact membership: s ∈ S iff
/// E⁺ − |A_s|·|A|² ≤ 0 or (E⁺ − |A_s|·|A|²)³·p < |A|⁹ (both sides integers;
/// equality is impossible since p is never a perfect cube).
pub fn popular_differences(set: &FpSet) -> Result<PopularDiffs, SetError> {
    if set.is_empty() {
        return Err(SetError::EmptySet);
    }
    let p = set.p();
    let card = set.card() as u64;
    let diffs = pair_diff_counts(set);
    let eplus: u128 = diffs.iter().map(|&c| (c as u128) * (c as u128)).sum();
    let card3 = (card as u128).pow(3);
    let epsilon = 1.0 - eplus as f64 / card3 as f64;
    let pinv_cbrt = (p as f64).powf(-1.0 / 3.0);
    let threshold = (1.0 - epsilon - pinv_cbrt) * card as f64;

    let a2 = BigInt::from(card) * BigInt::from(card);
    let a9 = BigInt::from(card).pow(9);
    let mut s_set = FpSet::empty(p)?;
    for (s, &c) in diffs.iter().enumerate() {
        if c == 0 {
            continue; // only differences realized in A−A are candidates
        }
        let l = BigInt::from(eplus) - BigInt::from(c) * &a2;
        let member = l <= BigInt::from(0) || (&l * &l * &l) * BigInt::from(p) < a9;
        if member {
            s_set.bits.set(s);
        }
    }
    let s3p = BigUint::from(s_set.card()).pow(3) * BigUint::from(p);
    let lower_bound_ok = s3p >= BigUint::from(card).pow(3);
    Ok(PopularDiffs {
        epsilon,
        additive_energy: eplus,
        threshold,
        set: s_set,
        lower_bound_ok,
    })
}

// ---------------------------------------------------------------------------
// dlog-domain fast paths
// ---------------------------------------------------------------------------

/// Product set via discrete logs: the nonzero parts of A and B map to
/// subsets of Z_{p−1} where the product becomes a sumset, handled by the
/// same word-parallel shift union. O(p·min(|A|,|B|)/64 + p).
pub fn fast_product_set(ctx: &FieldCtx, a: &FpSet, b: &FpSet) -> Result<FpSet, SetError> {
    if ctx.p() != a.p() {
        return Err(SetError::ModulusMismatch { left: ctx.p(), right: a.p() });
    }
    a.same_field(b)?;
    let p = a.p();
    let t = ctx.dlog_tables();
    let n = (p - 1) as usize;
    let mut la = BitBuf::new(n);
    let mut lb = BitBuf::new(n);
    let mut a_nonzero = 0usize;
    let mut b_nonzero = 0usize;
    for x in a.iter().filter(|&x| x != 0) {
        la.set(t.dlog[x as usize] as usize);
        a_nonzero += 1;
    }
    for x in b.iter().filter(|&x| x != 0) {
        lb.set(t.dlog[x as usize] as usize);
        b_nonzero += 1;
    }
    let (small, large) = if a_nonzero <= b_nonzero { (&la, &lb) } else { (&lb, &la) };
    let mut lsum = BitBuf::new(n);
    for k in small.iter_ones() {
        lsum.or_rotated(large, k);
    }
    let mut out = FpSet::empty(p)?;
    for k in lsum.iter_ones() {
        out.bits.set(t.pow[k] as usize);
    }
    // 0 ∈ AB iff one side contains 0 and the other is nonempty.
    if (a.contains(0) && !b.is_empty()) || (b.contains(0) && !a.is_empty()) {
        out.bits.set(0);
    }
    Ok(out)
}

/// A(A+A) via the dlog-domain product; contract-equal to
/// [`FpSet::a_aplusa`].
pub fn fast_a_aplusa(ctx: &FieldCtx, a: &FpSet) -> Result<FpSet, SetError> {
    let sums = a.sumset(a)?;
    fast_product_set(ctx, a, &sums)
}

/// Missing elements via the dlog-domain product; contract-equal to
/// [`FpSet::missing_elements`].
pub fn fast_missing_elements(ctx: &FieldCtx, a: &FpSet) -> Result<FpSet, SetError> {
    Ok(fast_a_aplusa(ctx, a)?.complement_nonzero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: u64, elems: &[u64]) -> FpSet {
        FpSet::from_elems(p, elems).unwrap()
    }

    /// Brute-force oracle: sumset by direct enumeration.
    fn naive_sumset(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out: Vec<u64> = a.iter().flat_map(|&x| b.iter().map(move |&y| (x + y) % p)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Brute-force oracle: A(A+A) by triple enumeration.
    fn naive_a_aplusa(p: u64, a: &[u64]) -> Vec<u64> {
        let mut out = Vec::new();
        for &x in a {
            for &y in a {
                for &z in a {
                    out.push(mul_mod(x, (y + z) % p, p));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    #[test]
    fn modulus_validation() {
        assert_eq!(FpSet::empty(9).unwrap_err(), SetError::CompositeModulus(9));
        assert_eq!(FpSet::empty(2).unwrap_err(), SetError::ModulusOutOfRange(2));
        assert_eq!(
            FpSet::from_elems(7, &[7]).unwrap_err(),
            SetError::ElementOutOfRange { x: 7, p: 7 }
        );
    }

    #[test]
    fn literal_roundtrip_and_hex() {
        let a = FpSet::parse(13, "1, 5,8").unwrap();
        assert_eq!(a.elems(), vec![1, 5, 8]);
        assert_eq!(a.to_literal(), "1,5,8");
        // {1,2} = bits 1,2 = 0b110 = 0x6
        let b = FpSet::parse(7, "0x6").unwrap();
        assert_eq!(b.elems(), vec![1, 2]);
        assert_eq!(b.to_hex(), "0x6");
        let rt = FpSet::parse(13, &a.to_hex()).unwrap();
        assert_eq!(rt, a);
        assert!(FpSet::parse(7, "").unwrap().is_empty());
        assert!(matches!(FpSet::parse(7, "1,x").unwrap_err(), SetError::BadLiteral(_)));
        assert!(matches!(FpSet::parse(7, "0x80").unwrap_err(), SetError::ElementOutOfRange { .. }));
    }

    #[test]
    fn sumset_matches_oracle_and_examples() {
        // {1,2} + {1,2} = {2,3,4} mod 7.
        assert_eq!(set(7, &[1, 2]).sumset(&set(7, &[1, 2])).unwrap().elems(), vec![2, 3, 4]);
        // Wraparound: {3,4} + {3,4} = {6,0,1} mod 7.
        assert_eq!(set(7, &[3, 4]).sumset(&set(7, &[3, 4])).unwrap().elems(), vec![0, 1, 6]);
        // Oracle cross-check on a few dozen random-ish sets.
        for p in [3u64, 5, 7, 13, 31, 67, 127, 257] {
            for k in 0..12u64 {
                let a: Vec<u64> = (0..p).filter(|x| (x * 17 + k * 3 + 1) % 5 < 2).collect();
                let b: Vec<u64> = (0..p).filter(|x| (x * 11 + k * 7 + 2) % 4 < 2).collect();
                let got = set(p, &a).sumset(&set(p, &b)).unwrap().elems();
                assert_eq!(got, naive_sumset(p, &a, &b), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn mismatched_moduli_are_rejected() {
        let e = set(7, &[1]).sumset(&set(11, &[1])).unwrap_err();
        assert_eq!(e, SetError::ModulusMismatch { left: 7, right: 11 });
    }

    #[test]
    fn product_set_example() {
        // {1,2}·{2,3,4} = {2,3,4} ∪ {4,6,1} = {1,2,3,4,6} mod 7.
        let got = set(7, &[1, 2]).product_set(&set(7, &[2, 3, 4])).unwrap();
        assert_eq!(got.elems(), vec![1, 2, 3, 4, 6]);
    }

    #[test]
    fn inverse_set_examples() {
        // 5·8 = 40 ≡ 1 (mod 13): {5,8} is inverse-closed.
        let a = set(13, &[5, 8]);
        assert_eq!(a.inverse_set().unwrap(), a);
        assert_eq!(set(7, &[0, 1]).inverse_set().unwrap_err(), SetError::ZeroInSet);
    }

    #[test]
    fn dilate_and_negate() {
        assert_eq!(set(7, &[1, 2]).dilate(3).unwrap().elems(), vec![3, 6]);
        assert_eq!(set(7, &[1, 2]).dilate(0).unwrap_err(), SetError::ZeroDilation);
        assert_eq!(set(7, &[0, 1, 2]).negate().elems(), vec![0, 5, 6]);
    }

    #[test]
    fn a_aplusa_examples_and_oracle() {
        // A = {1,2} mod 7: A+A = {2,3,4}, A(A+A) = {1,2,3,4,6}, missing {5}.
        let a = set(7, &[1, 2]);
        assert_eq!(a.a_aplusa().elems(), vec![1, 2, 3, 4, 6]);
        assert_eq!(a.missing_elements().elems(), vec![5]);
        // A = {1,4} mod 5: A+A = {2,0,3}, A(A+A) = {0,2,3}; nonzero part {2,3}.
        let b = set(5, &[1, 4]);
        assert_eq!(b.a_aplusa().elems(), vec![0, 2, 3]);
        assert_eq!(b.missing_elements().elems(), vec![1, 4]);
        // Dense set covers everything: A = {1,2,3,4} mod 5.
        assert!(set(5, &[1, 2, 3, 4]).missing_elements().is_empty());
        // Oracle cross-check.
        for p in [5u64, 7, 11, 13, 17] {
            for k in 0..10u64 {
                let a: Vec<u64> = (1..p).filter(|x| (x * 13 + k) % 3 == 0).collect();
                if a.is_empty() {
                    continue;
                }
                let got = set(p, &a).a_aplusa().elems();
                assert_eq!(got, naive_a_aplusa(p, &a), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn avoids_target_agrees_with_product_set() {
        for p in [5u64, 7, 13, 31] {
            for k in 0..10u64 {
                let elems: Vec<u64> = (1..p).filter(|x| (x * 7 + k) % 3 == 0).collect();
                let a = set(p, &elems);
                let prod = a.a_aplusa();
                for x in 1..p {
                    assert_eq!(a.avoids_target(x).unwrap(), !prod.contains(x), "p={p} x={x}");
                }
            }
        }
        assert_eq!(set(7, &[1]).avoids_target(0).unwrap_err(), SetError::ZeroTarget);
    }

    #[test]
    fn rep_r1_example() {
        // p=7, A={1,2}, x=3: 3·1⁻¹ = 3 gives y ∈ {2,1}; 3·2⁻¹ = 5 gives {4,3}.
        let r = rep_r1(&set(7, &[1, 2]), 3).unwrap();
        assert_eq!(
            r.iter_nonzero_counts().collect::<Vec<_>>(),
            vec![(1, 1), (2, 1), (3, 1), (4, 1)]
        );
        assert_eq!(r.total(), 4); // |A|²
        assert_eq!(rep_r1(&set(7, &[0, 1]), 3).unwrap_err(), SetError::ZeroInSet);
        assert_eq!(rep_r1(&set(7, &[1]), 0).unwrap_err(), SetError::ZeroTarget);
    }

    #[test]
    fn rep_r2_examples() {
        // p=7, A={1,2}, x=3: sums 2,3,3,4 → y = 3·s⁻¹ ∈ {5, 1, 1, 6}.
        let r = rep_r2(&set(7, &[1, 2]), 3).unwrap();
        assert_eq!(r.iter_nonzero_counts().collect::<Vec<_>>(), vec![(1, 2), (5, 1), (6, 1)]);
        // p=5, A={1,4}, x=1: nonzero sums 2 and 3 (1+4 = 0 dropped, both orders).
        let r2 = rep_r2(&set(5, &[1, 4]), 1).unwrap();
        assert_eq!(r2.iter_nonzero_counts().collect::<Vec<_>>(), vec![(2, 1), (3, 1)]);
        assert_eq!(r2.total(), 2); // |A|² − #{c+d=0} = 4 − 2
    }

    #[test]
    fn rep_rho_example_and_consistency() {
        // p=7, A={1,2}: ρ = {1:1, 2:1, 3:2, 4:2, 6:2}, Σ = 8 = |A|³.
        let rho = rep_rho(&set(7, &[1, 2]));
        assert_eq!(
            rho.iter_nonzero_counts().collect::<Vec<_>>(),
            vec![(1, 1), (2, 1), (3, 2), (4, 2), (6, 2)]
        );
        assert_eq!(rho.total(), 8);
        assert_eq!(rho.second_moment_nonzero(), 14); // N = 1+1+4+4+4

        // ρ consistency against a brute-force triple loop.
        for p in [5u64, 11, 13] {
            for k in 0..6u64 {
                let elems: Vec<u64> = (1..p).filter(|x| (x * 5 + k) % 3 != 1).collect();
                let a = set(p, &elems);
                let rho = rep_rho(&a);
                let mut oracle = vec![0u64; p as usize];
                for &x in &elems {
                    for &y in &elems {
                        for &z in &elems {
                            oracle[mul_mod(x, (y + z) % p, p) as usize] += 1;
                        }
                    }
                }
                assert_eq!(rho.counts, oracle, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn energies_match_quadruple_oracle() {
        // Frozen examples (quadruple-loop oracle values).
        assert_eq!(additive_energy(&set(7, &[1, 2])), 6);
        assert_eq!(additive_energy(&set(5, &[1, 2, 3, 4])), 52);
        assert_eq!(multiplicative_energy(&set(5, &[1, 2])), 6);
        // {1,2,4} is the group of squares mod 7: products are uniform and
        // E× = 3·3² = 27.
        assert_eq!(multiplicative_energy(&set(7, &[1, 2, 4])), 27);

        fn oracle(p: u64, a: &[u64], add: bool) -> u128 {
            let mut e = 0u128;
            for &x in a {
                for &y in a {
                    for &z in a {
                        for &w in a {
                            let l = if add { (x + p - y) % p } else { mul_mod(x, y, p) };
                            let r = if add { (z + p - w) % p } else { mul_mod(z, w, p) };
                            if l == r {
                                e += 1;
                            }
                        }
                    }
                }
            }
            e
        }
        for p in [5u64, 7, 11] {
            for k in 0..5u64 {
                let elems: Vec<u64> = (1..p).filter(|x| (x + k) % 3 != 0).collect();
                let a = set(p, &elems);
                assert_eq!(additive_energy(&a), oracle(p, &elems, true), "E+ p={p} k={k}");
                assert_eq!(multiplicative_energy(&a), oracle(p, &elems, false), "E× p={p} k={k}");
            }
        }
    }

    #[test]
    fn intersect_shifted_is_the_energy_slice() {
        let a = set(13, &[1, 2, 3, 7]);
        for s in 0..13 {
            let slice = a.intersect_shifted(s);
            let oracle: Vec<u64> =
                a.elems().into_iter().filter(|&x| a.contains((x + 13 - s) % 13)).collect();
            assert_eq!(slice.elems(), oracle, "s={s}");
        }
        // Σ_s |A_s|² = E⁺.
        let total: u128 = (0..13).map(|s| (a.intersect_shifted(s).card() as u128).pow(2)).sum();
        assert_eq!(total, additive_energy(&a));
    }

    #[test]
    fn popular_differences_examples() {
        // p=13, A={5,8}: E⁺ = 6, ε = 1/4, S = {0, 3, 10}.
        let pd = popular_differences(&set(13, &[5, 8])).unwrap();
        assert_eq!(pd.additive_energy, 6);
        assert!((pd.epsilon - 0.25).abs() < 1e-12);
        assert_eq!(pd.set.elems(), vec![0, 3, 10]);
        assert!(pd.lower_bound_ok);
        assert!(pd.set.contains(0));
        // p=7, A={1,2}: ε = 1 − 6/8 = 0.25.
        let pd2 = popular_differences(&set(7, &[1, 2])).unwrap();
        assert!((pd2.epsilon - 0.25).abs() < 1e-12);
        assert!(pd2.lower_bound_ok);
        assert_eq!(
            popular_differences(&FpSet::empty(7).unwrap()).unwrap_err(),
            SetError::EmptySet
        );
    }

    #[test]
    fn popular_membership_matches_float_threshold_off_boundary() {
        // The exact integer rule and the floating rule agree whenever the
        // float threshold is not razor-thin; spot-check a spread of sets.
        for p in [13u64, 31, 61] {
            for k in 0..8u64 {
                let elems: Vec<u64> = (1..p).filter(|x| (x * 3 + k) % 4 < 2).collect();
                if elems.is_empty() {
                    continue;
                }
                let a = set(p, &elems);
                let pd = popular_differences(&a).unwrap();
                for s in 0..p {
                    let asz = a.intersect_shifted(s).card() as f64;
                    if a.intersect_shifted(s).card() == 0 && !a.intersect_shifted(s).contains(0) {
                        continue;
                    }
                    let in_diff = pair_diff_counts(&a)[s as usize] > 0;
                    if !in_diff {
                        assert!(!pd.set.contains(s));
                        continue;
                    }
                    let f = asz - pd.threshold;
                    if f.abs() > 1e-6 {
                        assert_eq!(pd.set.contains(s), f > 0.0, "p={p} k={k} s={s}");
                    }
                }
            }
        }
    }

    #[test]
    fn fast_product_paths_agree_with_naive() {
        for p in [5u64, 13, 61, 127, 251, 509] {
            let ctx = FieldCtx::new(p).unwrap();
            for k in 0..6u64 {
                let a: Vec<u64> = (0..p).filter(|x| (x * 7 + k) % 5 < 2).collect();
                let b: Vec<u64> = (0..p).filter(|x| (x * 3 + k) % 4 < 2).collect();
                let (sa, sb) = (set(p, &a), set(p, &b));
                assert_eq!(
                    fast_product_set(&ctx, &sa, &sb).unwrap(),
                    sa.product_set(&sb).unwrap(),
                    "p={p} k={k}"
                );
                assert_eq!(fast_a_aplusa(&ctx, &sa).unwrap(), sa.a_aplusa(), "p={p} k={k}");
                assert_eq!(
                    fast_missing_elements(&ctx, &sa).unwrap(),
                    sa.missing_elements(),
                    "p={p} k={k}"
                );
            }
        }
    }

    #[test]
    fn progression_recognition() {
        assert_eq!(
            set(13, &[2, 5, 8, 11]).as_progression(),
            Some(Progression { start: 2, step: 3, len: 4 })
        );
        // Wraparound progression 11, 1, 4 (step 3 mod 13) = {1,4,11}.
        let pr = set(13, &[1, 4, 11]).as_progression().unwrap();
        assert_eq!((pr.step, pr.len), (3, 3));
        assert_eq!(pr.start, 11);
        assert_eq!(set(13, &[1, 2, 5]).as_progression(), None);
        // Full field is a progression; empty and singletons trivially so.
        assert_eq!(set(5, &[0, 1, 2, 3, 4]).as_progression().map(|q| q.len), Some(5));
        assert_eq!(FpSet::empty(5).unwrap().as_progression().map(|q| q.len), Some(0));
    }

    #[test]
    fn dilation_transports_missing_targets() {
        // x ∉ A(A+A) iff c²x ∉ (cA)((cA)+(cA)).
        let a = set(13, &[1, 2, 3]);
        for c in 1..13u64 {
            let ca = a.dilate(c).unwrap();
            for x in 1..13u64 {
                let cx = mul_mod(mul_mod(c, c, 13), x, 13);
                assert_eq!(
                    a.avoids_target(x).unwrap(),
                    ca.avoids_target(cx).unwrap(),
                    "c={c} x={x}"
                );
            }
        }
    }
}
