//! Fourier analysis on F_p: additive DFT, multiplicative characters,
//! Kloosterman sums, and rectification of sets into intervals.
//!
//! Additive side: f̂(t) = Σ_x f(x)·e_p(tx) with e_p(k) = exp(2πik/p),
//! evaluated directly in O(p·support). Parseval reads
//! Σ_x |f(x)|² = (1/p)·Σ_t |f̂(t)|².
//!
//! Multiplicative side: the p−1 characters χ_j(x) = e(j·ind(x)/(p−1)) where
//! ind is the discrete log base the least primitive root, with the
//! convention χ(0) = 0 for every character. Parseval over characters reads
//! (1/(p−1))·Σ_χ |Σ_{x≠0} f(x)χ(x)|² = Σ_{x≠0} |f(x)|².
//!
//! Every asserted inequality here is a proved theorem (Weil, the bilinear
//! character-sum bound, the bilinear additive bound, the half-interval
//! rectification floor), so violations are treated as implementation bugs:
//! the operations `assert!` them with an explicit 1e−9-scale slack for
//! floating-point accumulation.

use crate::field::{mul_mod, FieldCtx};
use crate::set::FpSet;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectraError {
    #[error("expected an array of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operation undefined on the empty set")]
    EmptySet,
    #[error("Kloosterman sum requires (a,b) ≠ (0,0)")]
    BothZero,
    #[error("frequency must be nonzero")]
    ZeroFrequency,
    #[error("operation requires 0 ∉ A")]
    ZeroInSet,
    #[error("character index 0 is the trivial character")]
    TrivialCharacter,
    #[error("set is not an arithmetic progression")]
    NotAProgression,
    #[error("inputs live in different fields: F_{left} vs F_{right}")]
    ModulusMismatch { left: u64, right: u64 },
}

/// Precomputed p-th roots of unity: `ep(k)` = exp(2πik/p).
pub struct UnityTable {
    p: u64,
    roots: Vec<Complex64>,
}

impl UnityTable {
    pub fn new(p: u64) -> Self {
        let roots = (0..p)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64))
            .collect();
        UnityTable { p, roots }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// e_p(k), k reduced mod p.
    #[inline]
    pub fn ep(&self, k: u64) -> Complex64 {
        self.roots[(k % self.p) as usize]
    }
}

/// An additive Fourier transform: coeffs[t] = f̂(t) = Σ_x f(x)e_p(tx).
#[derive(Debug, Clone)]
pub struct Spectrum {
    p: u64,
    pub coeffs: Vec<Complex64>,
}

impl Spectrum {
    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn coeff(&self, t: u64) -> Complex64 {
        self.coeffs[(t % self.p) as usize]
    }
}

/// Direct DFT of a complex array indexed by residues (length p).
pub fn additive_dft(p: u64, f: &[Complex64]) -> Result<Spectrum, SpectraError> {
    if f.len() != p as usize {
        return Err(SpectraError::LengthMismatch { expected: p as usize, got: f.len() });
    }
    let table = UnityTable::new(p);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); p as usize];
    for (x, &fx) in f.iter().enumerate() {
        if fx == Complex64::new(0.0, 0.0) {
            continue;
        }
        // e_p(t·x) walked incrementally: index advances by x per step of t.
        let mut idx = 0u64;
        for c in coeffs.iter_mut() {
            *c += fx * table.roots[idx as usize];
            idx += x as u64;
            if idx >= p {
                idx -= p;
            }
        }
    }
    Ok(Spectrum { p, coeffs })
}

/// Direct DFT of a real array indexed by residues (length p).
pub fn additive_dft_real(p: u64, f: &[f64]) -> Result<Spectrum, SpectraError> {
    let fc: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    additive_dft(p, &fc)
}

/// The indicator array of A as reals over residues 0..p.
pub fn indicator(a: &FpSet) -> Vec<f64> {
    let mut f = vec![0.0; a.p() as usize];
    for x in a.iter() {
        f[x as usize] = 1.0;
    }
    f
}

/// Both sides of additive Parseval: ((1/p)·Σ_t |f̂(t)|², Σ_x |f(x)|²).
pub fn additive_parseval_check(p: u64, f: &[Complex64]) -> Result<(f64, f64), SpectraError> {
    let spec = additive_dft(p, f)?;
    let lhs = spec.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / p as f64;
    let rhs = f.iter().map(|c| c.norm_sqr()).sum::<f64>();
    Ok((lhs, rhs))
}

/// γ = max_{h≠0} |1̂_A(h)|/|A| and a frequency attaining it.
#[derive(Debug, Clone, Copy)]
pub struct GammaMax {
    pub gamma: f64,
    pub h: u64,
}

/// The largest nontrivial Fourier coefficient of the indicator of A,
/// normalized by |A|.
pub fn gamma_max(a: &FpSet) -> Result<GammaMax, SpectraError> {
    if a.is_empty() {
        return Err(SpectraError::EmptySet);
    }
    let p = a.p();
    let table = UnityTable::new(p);
    let elems = a.elems();
    let mut best = (0.0f64, 1u64);
    for h in 1..p {
        let s: Complex64 = elems.iter().map(|&x| table.ep(mul_mod(h, x, p))).sum();
        let m = s.norm();
        if m > best.0 {
            best = (m, h);
        }
    }
    Ok(GammaMax { gamma: best.0 / a.card() as f64, h: best.1 })
}

// ---------------------------------------------------------------------------
// Kloosterman sums
// ---------------------------------------------------------------------------

/// K(a,b;p) = Σ_{k≠0} e_p(ak + bk⁻¹) for (a,b) ≠ (0,0). The Weil bound
/// |K| ≤ 2√p is asserted with slack 1e−9·(p−1) (the trivial bound of the
/// sum); it is a theorem, so a violation is an implementation bug.
pub fn kloosterman(ctx: &FieldCtx, a: u64, b: u64) -> Result<Complex64, SpectraError> {
    let table = UnityTable::new(ctx.p());
    kloosterman_with(ctx, &table, a, b)
}

/// [`kloosterman`] with a caller-hoisted root table, for exhaustive sweeps
/// over (a,b).
pub fn kloosterman_with(
    ctx: &FieldCtx,
    table: &UnityTable,
    a: u64,
    b: u64,
) -> Result<Complex64, SpectraError> {
    let p = ctx.p();
    if table.p() != p {
        return Err(SpectraError::ModulusMismatch { left: p, right: table.p() });
    }
    let (a, b) = (a % p, b % p);
    if a == 0 && b == 0 {
        return Err(SpectraError::BothZero);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..p {
        let e = (mul_mod(a, k, p) + mul_mod(b, ctx.inv(k).expect("k ≠ 0"), p)) % p;
        sum += table.ep(e);
    }
    let slack = 1e-9 * (p - 1) as f64;
    assert!(
        sum.norm() <= 2.0 * (p as f64).sqrt() + slack,
        "Weil bound violated at p={p}, a={a}, b={b}: |K| = {}",
        sum.norm()
    );
    Ok(sum)
}

/// An incomplete inverse exponential sum |Σ_{y∈P} e_p(r·y⁻¹)| together with
/// its ratio to √p·log p (the constant being tracked).
#[derive(Debug, Clone, Copy)]
pub struct IncompleteKloosterman {
    pub magnitude: f64,
    /// magnitude / (√p·ln p).
    pub ratio: f64,
}

/// Σ_{y∈P} e_p(r·y⁻¹) in modulus, for P avoiding 0 and r ≠ 0. P is
/// typically an interval {1..N}; the bound of interest, O(√p·log p), comes
/// from completing the sum, and the measured ratio is returned for
/// constant-tracking rather than asserted.
pub fn incomplete_kloosterman(
    ctx: &FieldCtx,
    p_set: &FpSet,
    r: u64,
) -> Result<IncompleteKloosterman, SpectraError> {
    let p = ctx.p();
    if p_set.p() != p {
        return Err(SpectraError::ModulusMismatch { left: p, right: p_set.p() });
    }
    if r.is_multiple_of(p) {
        return Err(SpectraError::ZeroFrequency);
    }
    if p_set.contains(0) {
        return Err(SpectraError::ZeroInSet);
    }
    let table = UnityTable::new(p);
    let sum: Complex64 = p_set
        .iter()
        .map(|y| table.ep(mul_mod(r, ctx.inv(y).expect("y ≠ 0"), p)))
        .sum();
    let magnitude = sum.norm();
    let ratio = magnitude / ((p as f64).sqrt() * (p as f64).ln());
    Ok(IncompleteKloosterman { magnitude, ratio })
}

// ---------------------------------------------------------------------------
// Fourier L1 of progressions
// ---------------------------------------------------------------------------

/// Σ_r |1̂_P(r)| for an arithmetic progression P, plus its ratio to p·log p.
#[derive(Debug, Clone, Copy)]
pub struct ApL1 {
    pub l1: f64,
    /// l1 / (p·ln p).
    pub ratio: f64,
}

/// The Fourier L1 norm of a progression indicator, via the Dirichlet-kernel
/// closed form: for P of length m and step d, |1̂_P(t)| =
/// |sin(πum/p)/sin(πu/p)| at u = td, and u ↦ td permutes residues, so
/// Σ_t |1̂_P(t)| = m + Σ_{u≠0} |sin(πum/p)/sin(πu/p)| in O(p).
pub fn ap_fourier_l1(p_set: &FpSet) -> Result<ApL1, SpectraError> {
    let pr = p_set.as_progression().ok_or(SpectraError::NotAProgression)?;
    let p = p_set.p();
    let m = pr.len as f64;
    let mut l1 = m;
    for u in 1..p {
        let num = (PI * u as f64 * m / p as f64).sin().abs();
        let den = (PI * u as f64 / p as f64).sin().abs();
        l1 += num / den;
    }
    if pr.len == 0 {
        l1 = 0.0;
    }
    Ok(ApL1 { l1, ratio: l1 / (p as f64 * (p as f64).ln()) })
}

// ---------------------------------------------------------------------------
// Multiplicative characters
// ---------------------------------------------------------------------------

/// The full dual group of F_p*: χ_j(x) = e(j·ind(x)/(p−1)) for j in 0..p−1,
/// where ind is the discrete log base the least primitive root g; χ(0) = 0
/// for all characters by convention.
pub struct CharTable {
    p: u64,
    g: u64,
    dlog: Vec<u64>,
    /// roots[k] = e(k/(p−1)), k in 0..p−1.
    roots: Vec<Complex64>,
}

impl CharTable {
    pub fn new(ctx: &FieldCtx) -> Self {
        let p = ctx.p();
        let n = p - 1;
        let dlog = ctx.dlog_tables().dlog.clone();
        let roots = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect();
        CharTable { p, g: ctx.generator(), dlog, roots }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn generator(&self) -> u64 {
        self.g
    }

    /// χ_j(x); the index j is reduced mod p−1, and χ(0) = 0.
    #[inline]
    pub fn chi(&self, j: u64, x: u64) -> Complex64 {
        let x = x % self.p;
        if x == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let n = self.p - 1;
        self.roots[mul_mod(j % n, self.dlog[x as usize], n) as usize]
    }

    /// The index of the quadratic (Legendre) character: (p−1)/2.
    #[inline]
    pub fn legendre_index(&self) -> u64 {
        (self.p - 1) / 2
    }
}

/// A bilinear character sum Σ_{a∈A,b∈B} χ(a+b) with its proved bound.
#[derive(Debug, Clone, Copy)]
pub struct BilinearCharSum {
    pub value: Complex64,
    /// √(|A||B|p(1−|B|/p)); |value| ≤ bound is asserted in the op.
    pub bound: f64,
}

/// Σ_{(a,b)∈A×B} χ_j(a+b) for a nontrivial character. Requires 0 ∉ A∪B.
/// The bound |Σ| ≤ √(|A||B|(p−|B|)) is a theorem (complete-sum
/// orthogonality after Cauchy–Schwarz) and is asserted with slack
/// 1e−9·|A||B|.
pub fn char_sum_ab(
    chars: &CharTable,
    a: &FpSet,
    b: &FpSet,
    chi_index: u64,
) -> Result<BilinearCharSum, SpectraError> {
    let p = chars.p();
    if a.p() != p {
        return Err(SpectraError::ModulusMismatch { left: p, right: a.p() });
    }
    if b.p() != p {
        return Err(SpectraError::ModulusMismatch { left: p, right: b.p() });
    }
    if chi_index.is_multiple_of(p - 1) {
        return Err(SpectraError::TrivialCharacter);
    }
    if a.contains(0) || b.contains(0) {
        return Err(SpectraError::ZeroInSet);
    }
    let mut value = Complex64::new(0.0, 0.0);
    for x in a.iter() {
        for y in b.iter() {
            value += chars.chi(chi_index, (x + y) % p);
        }
    }
    let (ca, cb) = (a.card() as f64, b.card() as f64);
    let bound = (ca * cb * (p as f64 - cb)).sqrt();
    let slack = 1e-9 * ca * cb;
    assert!(
        value.norm() <= bound + slack,
        "bilinear character bound violated at p={p}, j={chi_index}: |Σ| = {} > {bound}",
        value.norm()
    );
    Ok(BilinearCharSum { value, bound })
}

/// A bilinear additive sum Σ_{x∈A,y∈B} e_p(xy) with its proved bound.
#[derive(Debug, Clone, Copy)]
pub struct BilinearAdditive {
    pub value: Complex64,
    /// √(p|A||B|); |value| ≤ bound is asserted in the op.
    pub bound: f64,
}

/// Σ_{x∈A,y∈B} e_p(xy). The bound √(p|A||B|) follows from one
/// Cauchy–Schwarz plus Parseval and is asserted with slack 1e−9·|A||B|.
pub fn bilinear_additive(a: &FpSet, b: &FpSet) -> Result<BilinearAdditive, SpectraError> {
    let p = a.p();
    if b.p() != p {
        return Err(SpectraError::ModulusMismatch { left: p, right: b.p() });
    }
    let table = UnityTable::new(p);
    let mut value = Complex64::new(0.0, 0.0);
    for x in a.iter() {
        for y in b.iter() {
            value += table.ep(mul_mod(x, y, p));
        }
    }
    let (ca, cb) = (a.card() as f64, b.card() as f64);
    let bound = (p as f64 * ca * cb).sqrt();
    assert!(
        value.norm() <= bound + 1e-9 * ca * cb,
        "bilinear additive bound violated at p={p}: |Σ| = {} > {bound}",
        value.norm()
    );
    Ok(BilinearAdditive { value, bound })
}

// ---------------------------------------------------------------------------
// Rectification
// ---------------------------------------------------------------------------

/// The outcome of sweeping all dilations r and all cyclic windows of length
/// ⌈p/2⌉ for the window holding the most of rA.
#[derive(Debug, Clone, Copy)]
pub struct RectificationProfile {
    /// Dilation attaining the maximum (smallest such r).
    pub r: u64,
    /// Start of the best cyclic window {start, …, start+length−1}.
    pub start: u64,
    /// Window length used: ⌈p/2⌉ = (p+1)/2.
    pub length: u64,
    /// max_r max_window |rA ∩ window|.
    pub count: usize,
    /// γ = gamma_max(A).
    pub gamma: f64,
    /// Half-interval floor, variant i: (1+γ)|A|/2. Proved; asserted ≤ count.
    pub floor_i: f64,
    /// Variant-ii floor p·(α/2 + arcsin(πγα)/(2π)) with α = |A|/p; None
    /// when πγα > 1 puts the arcsin out of domain. Recorded, not asserted:
    /// see `floor_ii_ok`.
    pub floor_ii: Option<f64>,
    /// Whether count ≥ floor_ii − 1e−9·|A| (None when floor_ii is None).
    pub floor_ii_ok: Option<bool>,
}

/// max over r ∈ F_p* and over cyclic windows {s, …, s+length−1} of
/// |rA ∩ window|, as (count, r, start); ties resolve to the smallest r,
/// then the smallest start. O(p²) via a sliding window per dilation.
pub fn best_dilated_window(a: &FpSet, length: u64) -> Result<(usize, u64, u64), SpectraError> {
    if a.is_empty() {
        return Err(SpectraError::EmptySet);
    }
    let p = a.p();
    let mut best = (0usize, 1u64, 0u64); // (count, r, start)
    for r in 1..p {
        let ra = a.dilate(r).expect("r ≠ 0");
        let ind: Vec<u8> = (0..p).map(|x| ra.contains(x) as u8).collect();
        let mut w: usize = (0..length.min(p)).map(|j| ind[j as usize] as usize).sum();
        for start in 0..p {
            if w > best.0 {
                best = (w, r, start);
            }
            w -= ind[start as usize] as usize;
            w += ind[((start + length) % p) as usize] as usize;
        }
    }
    Ok(best)
}

/// Exhaustive rectification: for every r ∈ F_p*, slide a cyclic window of
/// length ⌈p/2⌉ over rA and take the best (r, window). The variant-i floor
/// (1+γ)|A|/2 is a theorem (pigeonhole on Re e_p(hx) after rotating the
/// maximizing coefficient) and is asserted with slack 1e−9·|A|; the
/// variant-ii floor is returned as data for the harness to judge.
pub fn rectification_profile(a: &FpSet) -> Result<RectificationProfile, SpectraError> {
    let p = a.p();
    let length = p.div_ceil(2);
    let gm = gamma_max(a)?;
    let (count, r, start) = best_dilated_window(a, length)?;
    let card = a.card() as f64;
    let alpha = card / p as f64;
    let floor_i = (1.0 + gm.gamma) * card / 2.0;
    assert!(
        count as f64 >= floor_i - 1e-9 * card,
        "half-interval floor violated at p={p}: count {count} < {floor_i}"
    );
    let arg = PI * gm.gamma * alpha;
    let (floor_ii, floor_ii_ok) = if arg <= 1.0 {
        let f = p as f64 * (alpha / 2.0 + arg.asin() / (2.0 * PI));
        (Some(f), Some(count as f64 >= f - 1e-9 * card))
    } else {
        (None, None)
    };
    Ok(RectificationProfile {
        r,
        start,
        length,
        count,
        gamma: gm.gamma,
        floor_i,
        floor_ii,
        floor_ii_ok,
    })
}

// ---------------------------------------------------------------------------
// Multiplicative Parseval
// ---------------------------------------------------------------------------

/// Both sides of multiplicative Parseval for f indexed over F_p* (f[x−1] is
/// the value at x): ((1/(p−1))·Σ_χ |Σ_x f(x)χ(x)|², Σ_x |f(x)|²).
pub fn mult_parseval_check(
    ctx: &FieldCtx,
    f: &[Complex64],
) -> Result<(f64, f64), SpectraError> {
    let p = ctx.p();
    let n = (p - 1) as usize;
    if f.len() != n {
        return Err(SpectraError::LengthMismatch { expected: n, got: f.len() });
    }
    let t = ctx.dlog_tables();
    // Permute to dlog order: g[k] = f(g^k); then Σ_x f(x)χ_j(x) is a DFT of
    // length p−1 walked with incremental indices.
    let g: Vec<Complex64> = (0..n).map(|k| f[(t.pow[k] - 1) as usize]).collect();
    let roots: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    let mut lhs = 0.0;
    for j in 0..n {
        let mut s = Complex64::new(0.0, 0.0);
        let mut idx = 0usize;
        for gk in &g {
            s += gk * roots[idx];
            idx += j;
            if idx >= n {
                idx -= n;
            }
        }
        lhs += s.norm_sqr();
    }
    lhs /= n as f64;
    let rhs = f.iter().map(|c| c.norm_sqr()).sum::<f64>();
    Ok((lhs, rhs))
}
