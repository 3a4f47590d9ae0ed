//! Prime-field contexts.
//!
//! A [`FieldCtx`] is a validated prime modulus p together with the lookup
//! tables the rest of the crate leans on: the full inverse table (built
//! eagerly in O(p) by the classical recurrence inv(x) = −⌊p/x⌋·inv(p mod x)),
//! the least primitive root, and a lazily built discrete-log table for
//! multiplicative character work.
//!
//! Scalars are plain `u64` residues in [0, p). Arithmetic widens through
//! `u128`, so any p < 2^62 is safe for add/mul without overflow.

use std::sync::OnceLock;

/// Largest allowed modulus (exclusive). Keeps a+b and the u128 products of
/// the widening modular multiply well inside range.
const MAX_P: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("modulus {0} out of supported range [3, 2^62)")]
    OutOfRange(u64),
    #[error("zero has no inverse / discrete log")]
    ZeroInput,
}

/// Deterministic Miller–Rabin, valid for every n < 2^64.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to
/// be sound for all 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    // n-1 = d * 2^s with d odd
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
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

/// A validated prime field F_p with precomputed tables.
pub struct FieldCtx {
    p: u64,
    /// inv[x] = x^{-1} mod p for x in 1..p; inv[0] = 0 (unused sentinel).
    inv: Vec<u64>,
    /// Least primitive root mod p.
    g: u64,
    dlog: OnceLock<DlogTables>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx").field("p", &self.p).field("g", &self.g).finish()
    }
}

/// Discrete-log table pair: `dlog[x]` solves g^dlog[x] = x for x ≠ 0, and
/// `pow[k] = g^k` is its inverse permutation (k in 0..p−1).
pub struct DlogTables {
    pub dlog: Vec<u64>,
    pub pow: Vec<u64>,
}

impl FieldCtx {
    /// Validates primality (deterministic Miller–Rabin) and builds the O(p)
    /// tables. Supported range: 3 ≤ p < 2^62.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !(3..MAX_P).contains(&p) {
            return Err(FieldError::OutOfRange(p));
        }
        if !is_prime_u64(p) {
            return Err(FieldError::CompositeModulus(p));
        }
        // inv[x] via inv[x] = (p - p/x) * inv[p % x] mod p, inv[1] = 1.
        let mut inv = vec![0u64; p as usize];
        inv[1] = 1;
        for x in 2..p {
            inv[x as usize] = mul_mod(p - p / x, inv[(p % x) as usize], p);
        }
        let g = least_primitive_root(p);
        Ok(FieldCtx { p, inv, g, dlog: OnceLock::new() })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Least primitive root modulo p.
    #[inline]
    pub fn generator(&self) -> u64 {
        self.g
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.p)
    }

    /// Table-lookup inverse. Errors on zero.
    #[inline]
    pub fn inv(&self, x: u64) -> Result<u64, FieldError> {
        if x == 0 {
            return Err(FieldError::ZeroInput);
        }
        Ok(self.inv[(x % self.p) as usize])
    }

    /// Euler's criterion: x is a nonzero quadratic residue iff
    /// x^((p−1)/2) = 1.
    pub fn is_square(&self, x: u64) -> Result<bool, FieldError> {
        if x.is_multiple_of(self.p) {
            return Err(FieldError::ZeroInput);
        }
        Ok(self.pow(x, (self.p - 1) / 2) == 1)
    }

    /// Least r ≥ 2 that is not a quadratic residue mod p.
    pub fn least_nonsquare(&self) -> u64 {
        (2..self.p)
            .find(|&r| self.pow(r, (self.p - 1) / 2) != 1)
            .expect("every odd prime has a nonsquare")
    }

    /// Discrete log base the least primitive root: returns k with g^k = x.
    /// Builds the O(p) table on first use (idempotent, thread-safe).
    pub fn dlog(&self, x: u64) -> Result<u64, FieldError> {
        if x.is_multiple_of(self.p) {
            return Err(FieldError::ZeroInput);
        }
        Ok(self.dlog_tables().dlog[(x % self.p) as usize])
    }

    pub fn dlog_tables(&self) -> &DlogTables {
        self.dlog.get_or_init(|| {
            let p = self.p as usize;
            let mut dlog = vec![0u64; p];
            let mut pow = vec![0u64; p - 1];
            let mut acc = 1u64;
            for k in 0..(p - 1) as u64 {
                pow[k as usize] = acc;
                dlog[acc as usize] = k;
                acc = self.mul(acc, self.g);
            }
            debug_assert_eq!(acc, 1, "generator order must be p-1");
            DlogTables { dlog, pow }
        })
    }
}

/// Least primitive root mod p, found by testing g = 2, 3, … against every
/// prime factor q of p−1: g is primitive iff g^((p−1)/q) ≠ 1 for all q.
fn least_primitive_root(p: u64) -> u64 {
    let factors = distinct_prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_and_out_of_range() {
        assert_eq!(FieldCtx::new(91).unwrap_err(), FieldError::CompositeModulus(91));
        assert_eq!(FieldCtx::new(1).unwrap_err(), FieldError::OutOfRange(1));
        assert_eq!(FieldCtx::new(2).unwrap_err(), FieldError::OutOfRange(2));
        assert_eq!(FieldCtx::new(1 << 62).unwrap_err(), FieldError::OutOfRange(1 << 62));
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division_below_10000() {
        fn trial(n: u64) -> bool {
            if n < 2 {
                return false;
            }
            let mut d = 2;
            while d * d <= n {
                if n.is_multiple_of(d) {
                    return false;
                }
                d += 1;
            }
            true
        }
        for n in 0..10_000 {
            assert_eq!(is_prime_u64(n), trial(n), "disagree at {n}");
        }
    }

    #[test]
    fn inverse_table_matches_fermat_inverse() {
        for p in [3u64, 5, 7, 101, 997] {
            let f = FieldCtx::new(p).unwrap();
            for x in 1..p {
                let byfermat = f.pow(x, p - 2);
                assert_eq!(f.inv(x).unwrap(), byfermat);
                assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
            }
        }
    }

    #[test]
    fn inv_of_zero_errors() {
        let f = FieldCtx::new(7).unwrap();
        assert_eq!(f.inv(0).unwrap_err(), FieldError::ZeroInput);
        assert_eq!(f.dlog(0).unwrap_err(), FieldError::ZeroInput);
        assert_eq!(f.is_square(0).unwrap_err(), FieldError::ZeroInput);
    }

    #[test]
    fn worked_inverse_examples() {
        let f = FieldCtx::new(7).unwrap();
        // x * inv(x) = 1: 1,4,5,2,3,6 is the inverse sequence for 1..6 mod 7.
        let inv7: Vec<u64> = (1..7).map(|x| f.inv(x).unwrap()).collect();
        assert_eq!(inv7, vec![1, 4, 5, 2, 3, 6]);
        let f13 = FieldCtx::new(13).unwrap();
        assert_eq!(f13.inv(5).unwrap(), 8); // 5·8 = 40 ≡ 1 (mod 13)
    }

    #[test]
    fn primitive_root_examples() {
        // Least primitive roots: well-known values.
        for (p, g) in [(3, 2), (5, 2), (7, 3), (11, 2), (13, 2), (101, 2), (191, 19)] {
            assert_eq!(FieldCtx::new(p).unwrap().generator(), g, "g mod {p}");
        }
    }

    #[test]
    fn generator_has_full_order() {
        for p in [5u64, 7, 13, 61, 251] {
            let f = FieldCtx::new(p).unwrap();
            let g = f.generator();
            let mut seen = vec![false; p as usize];
            let mut acc = 1u64;
            for _ in 0..p - 1 {
                assert!(!seen[acc as usize], "g^k repeats early mod {p}");
                seen[acc as usize] = true;
                acc = f.mul(acc, g);
            }
            assert_eq!(acc, 1);
        }
    }

    #[test]
    fn square_classification() {
        let f = FieldCtx::new(7).unwrap();
        // Squares mod 7 are {1, 2, 4}: 3² = 2 so 2 is a residue.
        assert!(f.is_square(2).unwrap());
        assert!(!f.is_square(3).unwrap());
        assert_eq!(f.least_nonsquare(), 3);
        // 2 is the least nonsquare mod 5 and mod 13.
        assert_eq!(FieldCtx::new(5).unwrap().least_nonsquare(), 2);
        assert_eq!(FieldCtx::new(13).unwrap().least_nonsquare(), 2);
        // 2 = 6² mod 17, so the least nonsquare mod 17 is 3.
        assert_eq!(FieldCtx::new(17).unwrap().least_nonsquare(), 3);
    }

    #[test]
    fn dlog_inverts_exponentiation() {
        let f = FieldCtx::new(101).unwrap();
        for x in 1..101 {
            assert_eq!(f.pow(f.generator(), f.dlog(x).unwrap()), x);
        }
        // Idempotent second build returns the same table.
        let t1 = f.dlog_tables() as *const _;
        let t2 = f.dlog_tables() as *const _;
        assert_eq!(t1, t2);
    }
}
