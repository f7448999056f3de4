//! Subsets of `Z_q` stored as membership bitsets.
//!
//! Bit `i` of the set is the canonical representative `i` in `{0, …, q-1}`;
//! bits past `q` in the last word are always zero. Cyclic translation is done
//! word-at-a-time, which is what makes sumsets cheap: `A + B` is the union of
//! the translates `A + b` over the smaller of the two sets.

use std::fmt;

use crate::error::{Error, Result};
use crate::residue::FactoredModulus;

/// Largest modulus a bitset may be built over.
pub const MAX_BITSET_MODULUS: u64 = 1 << 26;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: FactoredModulus,
    words: Vec<u64>,
}

impl ResidueSet {
    pub fn empty(modulus: &FactoredModulus) -> Result<Self> {
        let q = modulus.value();
        if q > MAX_BITSET_MODULUS {
            return Err(Error::OutOfRange {
                what: "residue set modulus",
                value: q,
                limit: MAX_BITSET_MODULUS,
            });
        }
        Ok(Self {
            modulus: modulus.clone(),
            words: vec![0; (q as usize).div_ceil(64)],
        })
    }

    pub fn full(modulus: &FactoredModulus) -> Result<Self> {
        let mut s = Self::empty(modulus)?;
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.clear_tail();
        Ok(s)
    }

    /// Builds a set from arbitrary integers, reducing each modulo `q`.
    pub fn from_residues<I>(modulus: &FactoredModulus, residues: I) -> Result<Self>
    where
        I: IntoIterator<Item = u64>,
    {
        let mut s = Self::empty(modulus)?;
        let q = modulus.value();
        for r in residues {
            s.insert(r % q);
        }
        Ok(s)
    }

    pub fn modulus(&self) -> &FactoredModulus {
        &self.modulus
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.modulus.value()
    }

    #[inline]
    pub fn contains(&self, r: u64) -> bool {
        r < self.q() && self.words[(r / 64) as usize] >> (r % 64) & 1 == 1
    }

    /// Inserts the canonical residue `r < q`.
    #[inline]
    pub fn insert(&mut self, r: u64) {
        assert!(
            r < self.q(),
            "residue {r} out of range for modulus {}",
            self.q()
        );
        self.words[(r / 64) as usize] |= 1 << (r % 64);
    }

    #[inline]
    pub fn remove(&mut self, r: u64) {
        if r < self.q() {
            self.words[(r / 64) as usize] &= !(1 << (r % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() as u64 == self.q()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i as u64 * 64;
            BitIter(w).map(move |b| base + b as u64)
        })
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// The set `{-a : a in A}`.
    pub fn negated(&self) -> Self {
        let q = self.q();
        let mut out = Self::empty(&self.modulus).expect("same modulus");
        for a in self.iter() {
            out.insert((q - a) % q);
        }
        out
    }

    /// The translate `{a + t : a in A}`.
    pub fn translated(&self, t: u64) -> Self {
        let mut out = Self::empty(&self.modulus).expect("same modulus");
        self.or_translate_into(&mut out.words, t % self.q());
        out
    }

    /// ORs the translate `A + t` into `dst` (a word buffer of the same length).
    pub(crate) fn or_translate_into(&self, dst: &mut [u64], t: u64) {
        let q = self.q() as usize;
        let t = t as usize % q;
        if t == 0 {
            for (d, s) in dst.iter_mut().zip(&self.words) {
                *d |= s;
            }
            return;
        }
        or_range(dst, t, &self.words, 0, q - t);
        or_range(dst, 0, &self.words, q - t, t);
    }

    /// Cyclic sumset `A + B`.
    pub fn sumset(&self, other: &Self) -> Result<Self> {
        self.check_same_modulus(other)?;
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Self::empty(&self.modulus)?;
        for b in small.iter() {
            large.or_translate_into(&mut out.words, b);
            if out.is_full() {
                break;
            }
        }
        Ok(out)
    }

    pub(crate) fn check_same_modulus(&self, other: &Self) -> Result<()> {
        if self.q() != other.q() {
            return Err(Error::ModulusMismatch(self.q(), other.q()));
        }
        Ok(())
    }

    fn clear_tail(&mut self) {
        let q = self.q() as usize;
        let rem = q % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResidueSet(mod {}) ", self.q())?;
        f.debug_set().entries(self.iter()).finish()
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

#[inline]
fn read_bits(src: &[u64], pos: usize, n: usize) -> u64 {
    let (w, b) = (pos / 64, pos % 64);
    let mut v = src[w] >> b;
    if b > 0 && w + 1 < src.len() {
        v |= src[w + 1] << (64 - b);
    }
    if n < 64 {
        v &= (1u64 << n) - 1;
    }
    v
}

#[inline]
fn or_bits(dst: &mut [u64], pos: usize, v: u64, n: usize) {
    let (w, b) = (pos / 64, pos % 64);
    dst[w] |= v << b;
    if b > 0 && b + n > 64 {
        dst[w + 1] |= v >> (64 - b);
    }
}

/// `dst[dst_off .. dst_off + len] |= src[src_off .. src_off + len]` at bit granularity.
fn or_range(dst: &mut [u64], dst_off: usize, src: &[u64], src_off: usize, len: usize) {
    let mut i = 0;
    while i < len {
        let n = (len - i).min(64);
        let chunk = read_bits(src, src_off + i, n);
        if chunk != 0 {
            or_bits(dst, dst_off + i, chunk, n);
        }
        i += n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::factorize;
    use proptest::prelude::*;

    fn naive_sumset(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let mut out: Vec<u64> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| (x + y) % q))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    #[test]
    fn basic_membership() {
        let m = factorize(130).unwrap();
        let mut s = ResidueSet::empty(&m).unwrap();
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.to_vec(), vec![0, 64, 129]);
        assert_eq!(s.len(), 3);
        assert!(!s.contains(130));
        s.remove(64);
        assert_eq!(s.len(), 2);
        assert_eq!(ResidueSet::full(&m).unwrap().len(), 130);
    }

    #[test]
    fn rejects_huge_modulus() {
        let m = factorize((1 << 26) + 1).unwrap();
        assert!(ResidueSet::empty(&m).is_err());
    }

    #[test]
    fn translation_wraps() {
        let m = factorize(70).unwrap();
        let s = ResidueSet::from_residues(&m, [0, 5, 63, 69]).unwrap();
        assert_eq!(s.translated(3).to_vec(), vec![2, 3, 8, 66]);
        assert_eq!(s.negated().to_vec(), vec![0, 1, 7, 65]);
    }

    proptest! {
        #[test]
        fn sumset_matches_pairwise(q in 1u64..300, a in prop::collection::vec(0u64..1000, 0..20),
                                   b in prop::collection::vec(0u64..1000, 0..20)) {
            let m = factorize(q).unwrap();
            let sa = ResidueSet::from_residues(&m, a.iter().copied()).unwrap();
            let sb = ResidueSet::from_residues(&m, b.iter().copied()).unwrap();
            let ra: Vec<u64> = sa.to_vec();
            let rb: Vec<u64> = sb.to_vec();
            prop_assert_eq!(sa.sumset(&sb).unwrap().to_vec(), naive_sumset(&ra, &rb, q));
        }
    }
}
