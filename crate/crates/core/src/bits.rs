//! Fixed-width bit buffers with cyclic shifts.
//!
//! [`BitBuf`] is the storage layer for residue sets: bit i stands for residue
//! i of a length-n cyclic group. The one non-obvious operation is
//! [`BitBuf::or_rotated`], a word-parallel `dst |= rotl(src, k)` used to form
//! sumsets as unions of cyclic shifts: A+B = ⋃_{a∈A} (B ≪ a). That turns a
//! sumset into O(|A|·n/64) word operations.

/// A bit vector of exactly `n` bits packed little-endian into u64 words.
/// Invariant: bits at positions ≥ n in the top word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitBuf {
    n: usize,
    words: Vec<u64>,
}

impl BitBuf {
    pub fn new(n: usize) -> Self {
        BitBuf { n, words: vec![0; n.div_ceil(64)] }
    }

    #[inline]
    pub fn len_bits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn zero_out(&mut self) {
        self.words.fill(0);
    }

    /// Clears any junk bits at positions ≥ n (restores the invariant after
    /// shifting operations).
    fn mask_top(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// dst |= src (same length required).
    pub fn or_assign(&mut self, src: &BitBuf) {
        debug_assert_eq!(self.n, src.n);
        for (d, s) in self.words.iter_mut().zip(&src.words) {
            *d |= s;
        }
    }

    pub fn and_assign(&mut self, src: &BitBuf) {
        debug_assert_eq!(self.n, src.n);
        for (d, s) in self.words.iter_mut().zip(&src.words) {
            *d &= s;
        }
    }

    /// dst &= !src.
    pub fn and_not_assign(&mut self, src: &BitBuf) {
        debug_assert_eq!(self.n, src.n);
        for (d, s) in self.words.iter_mut().zip(&src.words) {
            *d &= !s;
        }
    }

    pub fn not_in_place(&mut self) {
        for w in self.words.iter_mut() {
            *w = !*w;
        }
        self.mask_top();
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersects(&self, other: &BitBuf) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// dst |= rotl(src, k): cyclic left rotation of the n-bit buffer, i.e.
    /// bit (i + k) mod n of the result receives bit i of `src`.
    ///
    /// Decomposes as (src << k) | (src >> (n − k)) over n bits; both linear
    /// shifts are OR-ed into `self` word by word.
    pub fn or_rotated(&mut self, src: &BitBuf, k: usize) {
        debug_assert_eq!(self.n, src.n);
        debug_assert!(k < self.n);
        if k == 0 {
            self.or_assign(src);
            return;
        }
        self.or_shl(src, k);
        self.mask_top();
        self.or_shr(src, self.n - k);
    }

    /// dst |= (src << k), discarding bits shifted past position n−1 of the
    /// word array (caller masks the top afterwards).
    fn or_shl(&mut self, src: &BitBuf, k: usize) {
        let (q, r) = (k / 64, (k % 64) as u32);
        let nw = self.words.len();
        if r == 0 {
            for i in (0..nw.saturating_sub(q)).rev() {
                self.words[i + q] |= src.words[i];
            }
        } else {
            for i in (0..nw.saturating_sub(q)).rev() {
                self.words[i + q] |= src.words[i] << r;
                if i + q + 1 < nw {
                    self.words[i + q + 1] |= src.words[i] >> (64 - r);
                }
            }
        }
    }

    /// dst |= (src >> k).
    fn or_shr(&mut self, src: &BitBuf, k: usize) {
        let (q, r) = (k / 64, (k % 64) as u32);
        let nw = self.words.len();
        if r == 0 {
            for i in q..nw {
                self.words[i - q] |= src.words[i];
            }
        } else {
            for i in q..nw {
                self.words[i - q] |= src.words[i] >> r;
                if i > q {
                    self.words[i - q - 1] |= src.words[i] << (64 - r);
                }
            }
        }
    }

    /// Iterates set bit positions in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rem = w;
            std::iter::from_fn(move || {
                if rem == 0 {
                    None
                } else {
                    let b = rem.trailing_zeros() as usize;
                    rem &= rem - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

impl std::fmt::Debug for BitBuf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitBuf(n={}, ones={:?})", self.n, self.iter_ones().collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_ones(n: usize, ones: &[usize]) -> BitBuf {
        let mut b = BitBuf::new(n);
        for &i in ones {
            b.set(i);
        }
        b
    }

    #[test]
    fn rotation_matches_naive_for_many_shapes() {
        // Cross sizes that straddle word boundaries with every shift.
        for n in [3usize, 7, 17, 63, 64, 65, 127, 128, 130, 199] {
            let ones: Vec<usize> = (0..n).filter(|i| (i * 7 + n) % 3 == 0).collect();
            let src = from_ones(n, &ones);
            for k in 0..n {
                let mut dst = BitBuf::new(n);
                dst.or_rotated(&src, k);
                let expect: Vec<usize> = {
                    let mut v: Vec<usize> = ones.iter().map(|&i| (i + k) % n).collect();
                    v.sort_unstable();
                    v
                };
                assert_eq!(dst.iter_ones().collect::<Vec<_>>(), expect, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn or_rotated_accumulates() {
        let src = from_ones(10, &[0, 9]);
        let mut dst = from_ones(10, &[5]);
        dst.or_rotated(&src, 1);
        assert_eq!(dst.iter_ones().collect::<Vec<_>>(), vec![0, 1, 5]);
    }

    #[test]
    fn top_word_stays_clean() {
        let mut b = from_ones(65, &[64]);
        let src = from_ones(65, &[64]);
        b.or_rotated(&src, 64);
        // rotl by 64 over 65 bits maps bit 64 -> bit 63.
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![63, 64]);
        b.not_in_place();
        assert_eq!(b.count_ones(), 63);
    }
}
