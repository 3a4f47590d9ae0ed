//! Exact computation of m_p = max{|A| : A ⊆ F_p∖{0}, A(A+A) ⊉ F_p∖{0}}
//! for small primes, with independently re-verifiable certificates.
//!
//! By dilation symmetry (x ∉ A(A+A) ⟺ c²x ∉ (cA)((cA)+(cA))), a set
//! misses some nonzero value iff a dilate of it misses 1 or misses the
//! least nonsquare r — so the search runs per target x ∈ {1, r} and takes
//! the larger maximum.
//!
//! Two engines share a bitmask representation (bit i = residue i, p < 64):
//!
//! - exhaustive: every subset of F_p∖{0} with a popcount skip, p ≤ 23;
//! - branch and bound: depth-first include/exclude over residues. For
//!   target x each realized pair sum s = b+c ≠ 0 forbids the element
//!   a = x·s⁻¹; the search keeps the candidate set pruned of forbidden
//!   elements, branches on the candidate touching the most live
//!   constraints (include first), and cuts with |A| + |candidates| ≤ best
//!   plus the proved cap max ≤ ⌊(p+1)/3⌋.
//!
//! A node budget turns unfinished searches into certificates flagged
//! `optimal: false` rather than errors; every certificate's feasibility is
//! re-checked by direct membership after the search, so a buggy pruner can
//! cost optimality but never produce an infeasible witness.

use crate::field::{is_prime_u64, mul_mod, pow_mod, FieldCtx};
use crate::set::{FpSet, SetError};
use serde::ser::SerializeStruct;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtremalError {
    #[error("p = {p} exceeds the {limit} limit of this engine")]
    TooLarge { p: u64, limit: u64 },
    #[error("target must be nonzero")]
    ZeroTarget,
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Which engine produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    Exhaustive,
    BranchAndBound,
}

impl SearchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMethod::Exhaustive => "exhaustive",
            SearchMethod::BranchAndBound => "branch_and_bound",
        }
    }
}

/// The result of a maximum-witness search for one modulus.
#[derive(Debug, Clone)]
pub struct SearchCertificate {
    pub p: u64,
    /// The nonzero value the witness's A(A+A) misses.
    pub target: u64,
    /// A maximum (or, if `optimal` is false, best-found) set avoiding the
    /// target; 0 ∉ witness.
    pub witness: FpSet,
    pub size: usize,
    /// False when a node budget stopped the search early.
    pub optimal: bool,
    /// Subsets fully tested (exhaustive) or recursion nodes (branch&bound).
    pub nodes: u64,
    pub method: SearchMethod,
}

impl serde::Serialize for SearchCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SearchCertificate", 7)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("target", &self.target)?;
        st.serialize_field("witness", &self.witness.elems())?;
        st.serialize_field("size", &self.size)?;
        st.serialize_field("optimal", &self.optimal)?;
        st.serialize_field("nodes", &self.nodes)?;
        st.serialize_field("method", self.method.as_str())?;
        st.end()
    }
}

/// Re-checks a certificate by direct membership: 0 ∉ witness, the size
/// matches, and the target is genuinely outside witness(witness+witness).
pub fn verify_certificate(cert: &SearchCertificate) -> Result<bool, ExtremalError> {
    if cert.target.is_multiple_of(cert.p) {
        return Err(ExtremalError::ZeroTarget);
    }
    if cert.witness.p() != cert.p || cert.witness.contains(0) {
        return Ok(false);
    }
    if cert.witness.card() != cert.size {
        return Ok(false);
    }
    if cert.witness.is_empty() {
        return Ok(true);
    }
    Ok(cert.witness.avoids_target(cert.target)?)
}

const EXHAUSTIVE_LIMIT: u64 = 23;
const MASK_LIMIT: u64 = 63;

/// Default branch-and-bound node budget.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[inline]
fn rot(m: u64, k: u64, p: u64) -> u64 {
    // Cyclic rotation within the low p bits; 1 ≤ k < p < 64.
    ((m << k) | (m >> (p - k))) & ((1u64 << p) - 1)
}

fn cert_from_mask(
    p: u64,
    target: u64,
    mask: u64,
    nodes: u64,
    optimal: bool,
    method: SearchMethod,
) -> Result<SearchCertificate, ExtremalError> {
    let elems: Vec<u64> = (1..p).filter(|&r| mask >> r & 1 == 1).collect();
    let witness = FpSet::from_elems(p, &elems)?;
    let cert = SearchCertificate {
        p,
        target: target % p,
        witness,
        size: elems.len(),
        optimal,
        nodes,
        method,
    };
    assert!(
        verify_certificate(&cert)?,
        "search produced an infeasible witness at p={p}, target={target}"
    );
    Ok(cert)
}

/// Exhaustive maximum for one target: every subset of F_p∖{0} (popcount
/// skip), p ≤ 23.
pub fn mp_exhaustive_target(p: u64, x: u64) -> Result<SearchCertificate, ExtremalError> {
    if p > EXHAUSTIVE_LIMIT {
        return Err(ExtremalError::TooLarge { p, limit: EXHAUSTIVE_LIMIT });
    }
    if !is_prime_u64(p) {
        return Err(SetError::CompositeModulus(p).into());
    }
    let x = x % p;
    if x == 0 {
        return Err(ExtremalError::ZeroTarget);
    }
    // xinv[a] = x·a⁻¹: the pair sum whose presence would cover x via a.
    let xinv: Vec<u64> = (0..p)
        .map(|a| if a == 0 { 0 } else { mul_mod(x, pow_mod(a, p - 2, p), p) })
        .collect();
    let n = p - 1;
    let mut best_size = 0u32;
    let mut best_mask = 0u64;
    let mut nodes = 0u64;
    for bits in 0u64..(1u64 << n) {
        if bits.count_ones() <= best_size {
            continue;
        }
        nodes += 1;
        let mask = bits << 1; // bit r = residue r
        let mut sums = 0u64;
        let mut m = mask;
        while m != 0 {
            let a = m.trailing_zeros() as u64;
            sums |= rot(mask, a, p);
            m &= m - 1;
        }
        let mut covered = false;
        let mut m = mask;
        while m != 0 {
            let a = m.trailing_zeros() as u64;
            if sums >> xinv[a as usize] & 1 == 1 {
                covered = true;
                break;
            }
            m &= m - 1;
        }
        if !covered {
            best_size = bits.count_ones();
            best_mask = mask;
        }
    }
    cert_from_mask(p, x, best_mask, nodes, true, SearchMethod::Exhaustive)
}

/// Exact m_p by exhaustive enumeration over both canonical targets
/// (1 and the least nonsquare), p ≤ 23; returns the larger maximum.
pub fn mp_exhaustive(p: u64) -> Result<SearchCertificate, ExtremalError> {
    let ctx = FieldCtx::new(p).map_err(|_| SetError::CompositeModulus(p))?;
    let a = mp_exhaustive_target(p, 1)?;
    let b = mp_exhaustive_target(p, ctx.least_nonsquare())?;
    Ok(if b.size > a.size { b } else { a })
}

struct BbSearch {
    p: u64,
    /// forb[s] = x·s⁻¹ for s ≠ 0: the element forbidden by pair sum s.
    forb: Vec<u64>,
    cap: u32,
    budget: u64,
    nodes: u64,
    timed_out: bool,
    best_size: u32,
    best_mask: u64,
}

impl BbSearch {
    /// Attempts to add candidate v: returns the updated (sums, candidates)
    /// or None when some new pair sum forbids an element already chosen.
    fn try_include(&self, a: u64, c: u64, sums: u64, v: u64) -> Option<(u64, u64)> {
        let na = a | 1 << v;
        let nsums = sums | rot(na, v, self.p);
        let mut nc = c & !(1 << v);
        let mut fresh = nsums & !sums & !1u64; // new sums, s = 0 dropped
        while fresh != 0 {
            let s = fresh.trailing_zeros() as usize;
            let f = self.forb[s];
            if na >> f & 1 == 1 {
                return None;
            }
            nc &= !(1 << f);
            fresh &= fresh - 1;
        }
        Some((nsums, nc))
    }

    /// The candidate touching the most live constraints (ties to the
    /// smallest residue): for v, count pair sums v+w over w ∈ A∪{v} whose
    /// forbidden element is still selectable.
    fn pick(&self, a: u64, c: u64) -> u64 {
        let live = a | c;
        let mut best_v = 0u64;
        let mut best_deg = -1i64;
        let mut m = c;
        while m != 0 {
            let v = m.trailing_zeros() as u64;
            m &= m - 1;
            let mut deg = 0i64;
            let mut w = a | 1 << v;
            while w != 0 {
                let u = w.trailing_zeros() as u64;
                w &= w - 1;
                let s = (v + u) % self.p;
                if s != 0 && live >> self.forb[s as usize] & 1 == 1 {
                    deg += 1;
                }
            }
            if deg > best_deg {
                best_deg = deg;
                best_v = v;
            }
        }
        best_v
    }

    fn rec(&mut self, a: u64, c: u64, sums: u64, k: u32) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.timed_out = true;
            return;
        }
        if k > self.best_size {
            self.best_size = k;
            self.best_mask = a;
        }
        if self.best_size >= self.cap {
            return; // the proved cap ⌊(p+1)/3⌋ is attained: nothing better exists
        }
        if c == 0 || k + c.count_ones() <= self.best_size {
            return;
        }
        let v = self.pick(a, c);
        if let Some((nsums, nc)) = self.try_include(a, c, sums, v) {
            self.rec(a | 1 << v, nc, nsums, k + 1);
            if self.timed_out {
                return;
            }
        }
        self.rec(a, c & !(1 << v), sums, k);
    }
}

/// Branch-and-bound maximum for one target, p < 64. A budget overrun
/// returns the best witness found so far with `optimal: false`.
pub fn mp_branch_bound(p: u64, x: u64, budget: u64) -> Result<SearchCertificate, ExtremalError> {
    if p > MASK_LIMIT {
        return Err(ExtremalError::TooLarge { p, limit: MASK_LIMIT });
    }
    if !is_prime_u64(p) {
        return Err(SetError::CompositeModulus(p).into());
    }
    let x = x % p;
    if x == 0 {
        return Err(ExtremalError::ZeroTarget);
    }
    let forb: Vec<u64> = (0..p)
        .map(|s| if s == 0 { 0 } else { mul_mod(x, pow_mod(s, p - 2, p), p) })
        .collect();
    let mut search = BbSearch {
        p,
        forb,
        cap: ((p + 1) / 3) as u32,
        budget,
        nodes: 0,
        timed_out: false,
        best_size: 0,
        best_mask: 0,
    };
    let all = ((1u64 << p) - 1) & !1u64; // residues 1..p−1
    search.rec(0, all, 0, 0);
    cert_from_mask(p, x, search.best_mask, search.nodes, !search.timed_out, SearchMethod::BranchAndBound)
}

/// m_p via branch and bound over both canonical targets; `optimal` only if
/// both single-target searches finished within budget.
pub fn mp_branch_bound_best(p: u64, budget: u64) -> Result<SearchCertificate, ExtremalError> {
    let ctx = FieldCtx::new(p).map_err(|_| SetError::CompositeModulus(p))?;
    let a = mp_branch_bound(p, 1, budget)?;
    let b = mp_branch_bound(p, ctx.least_nonsquare(), budget)?;
    let both_optimal = a.optimal && b.optimal;
    let mut best = if b.size > a.size { b } else { a };
    best.optimal = both_optimal;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{inverse_closed_sumfree, one_avoider, Density};

    /// Frozen by independent enumeration.
    const KNOWN_MP: [(u64, usize); 7] =
        [(3, 1), (5, 2), (7, 2), (11, 4), (13, 4), (17, 5), (19, 6)];

    #[test]
    fn exhaustive_matches_frozen_values() {
        for (p, mp) in KNOWN_MP {
            let cert = mp_exhaustive(p).unwrap();
            assert_eq!(cert.size, mp, "p={p}");
            assert!(cert.optimal);
            assert!(verify_certificate(&cert).unwrap());
            assert!(cert.size as u64 <= (p + 1) / 3, "cap at p={p}");
        }
    }

    #[test]
    fn exhaustive_p5_details() {
        // Witness of size 2 avoiding target 1 exists; no size-3 set works:
        // the cap (5+1)/3 = 2 forces coverage for |A| = 3.
        let cert = mp_exhaustive_target(5, 1).unwrap();
        assert_eq!(cert.size, 2);
        assert!(cert.witness.avoids_target(1).unwrap());
        // At p=3 the nonsquare target only admits the empty witness.
        let empty = mp_exhaustive_target(3, 2).unwrap();
        assert_eq!(empty.size, 0);
        assert!(verify_certificate(&empty).unwrap());
    }

    #[test]
    fn exhaustive_rejects_large_p_and_zero_target() {
        assert_eq!(
            mp_exhaustive(29).unwrap_err(),
            ExtremalError::TooLarge { p: 29, limit: 23 }
        );
        assert_eq!(mp_exhaustive_target(7, 0).unwrap_err(), ExtremalError::ZeroTarget);
        assert_eq!(
            mp_branch_bound(67, 1, 1000).unwrap_err(),
            ExtremalError::TooLarge { p: 67, limit: 63 }
        );
    }

    #[test]
    fn branch_bound_agrees_with_exhaustive_per_target() {
        for p in [3u64, 5, 7, 11, 13, 17, 19] {
            let ctx = FieldCtx::new(p).unwrap();
            for x in [1, ctx.least_nonsquare()] {
                let ex = mp_exhaustive_target(p, x).unwrap();
                let bb = mp_branch_bound(p, x, DEFAULT_BUDGET).unwrap();
                assert_eq!(bb.size, ex.size, "p={p} x={x}");
                assert!(bb.optimal);
                assert!(verify_certificate(&bb).unwrap());
            }
        }
    }

    #[test]
    fn branch_bound_frozen_values_midrange() {
        // Frozen by an independent implementation of the same search.
        for (p, mp) in [(23u64, 6usize), (29, 8), (31, 8), (37, 10), (41, 10), (43, 12)] {
            let cert = mp_branch_bound_best(p, DEFAULT_BUDGET).unwrap();
            assert_eq!(cert.size, mp, "p={p}");
            assert!(cert.optimal, "p={p}");
            assert!(verify_certificate(&cert).unwrap());
            assert!(cert.size as u64 <= (p + 1) / 3, "cap at p={p}");
        }
    }

    #[test]
    fn exhaustive_23_matches_branch_bound() {
        let ex = mp_exhaustive(23).unwrap();
        let bb = mp_branch_bound_best(23, DEFAULT_BUDGET).unwrap();
        assert_eq!(ex.size, bb.size);
        assert_eq!(ex.size, 6);
    }

    #[test]
    fn targets_can_disagree() {
        // p=37: the two canonical targets have different maxima.
        let t1 = mp_branch_bound(37, 1, DEFAULT_BUDGET).unwrap();
        let ctx = FieldCtx::new(37).unwrap();
        let tr = mp_branch_bound(37, ctx.least_nonsquare(), DEFAULT_BUDGET).unwrap();
        assert_eq!(t1.size, 10);
        assert_eq!(tr.size, 9);
    }

    #[test]
    fn dilation_symmetry_of_targets() {
        // Targets in the same square class give the same maximum:
        // 4 = 2²·1, so target 4 matches target 1.
        let a = mp_branch_bound(13, 1, DEFAULT_BUDGET).unwrap();
        let b = mp_branch_bound(13, 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(a.size, b.size);
    }

    #[test]
    fn search_dominates_feasible_seeds() {
        for p in [13u64, 17, 19, 23, 29] {
            let cert = mp_branch_bound_best(p, DEFAULT_BUDGET).unwrap();
            let core = inverse_closed_sumfree(p).unwrap();
            assert!(cert.size >= core.card(), "p={p} invclosed");
            let avoider = one_avoider(p, Density::Ratio(1, 4)).unwrap();
            assert!(cert.size >= avoider.set.card(), "p={p} avoider");
        }
    }

    #[test]
    fn budget_overrun_flags_non_optimal_but_stays_feasible() {
        let cert = mp_branch_bound(31, 1, 10).unwrap();
        assert!(!cert.optimal);
        assert!(verify_certificate(&cert).unwrap());
        assert!(cert.size <= mp_branch_bound(31, 1, DEFAULT_BUDGET).unwrap().size);
    }

    #[test]
    fn certificate_serializes_with_the_documented_fields() {
        let cert = mp_exhaustive(5).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["p"], 5);
        assert!(json["target"].is_u64());
        assert!(json["witness"].is_array());
        assert_eq!(json["size"], cert.size);
        assert_eq!(json["optimal"], true);
        assert!(json["nodes"].is_u64());
        assert_eq!(json["method"], "exhaustive");
    }
}
