//! Downsets of `Z_q` for square-free `q`, viewed through the CRT as the box
//! `prod_{p | q} {0, ..., p-1}` with coordinate-wise order.
//!
//! Compression along a prime `p` replaces every fiber (the elements sharing
//! all coordinates except the `p`-th) by the initial segment of the same
//! size. Compressing along every prime in increasing order yields a downset
//! of the same size whose sumsets are no larger.

use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, mul_mod};
use crate::error::{invalid, Error, Result};
use crate::residue::FactoredModulus;
use crate::residue_set::ResidueSet;

/// A residue of a square-free modulus in CRT coordinates, one per prime in
/// increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrtVector {
    pub modulus: FactoredModulus,
    pub coords: Vec<u64>,
}

/// Precomputed CRT data for a square-free modulus.
#[derive(Clone, Debug)]
pub(crate) struct CrtBasis {
    q: u64,
    primes: Vec<u64>,
    /// `e_i = 1 mod p_i`, `0 mod p_j` for `j != i`.
    idempotents: Vec<u64>,
}

impl CrtBasis {
    pub(crate) fn new(modulus: &FactoredModulus) -> Result<Self> {
        if !modulus.is_square_free() {
            return Err(Error::NotSquareFree(modulus.value()));
        }
        let q = modulus.value();
        let primes: Vec<u64> = modulus.primes().collect();
        let idempotents = primes
            .iter()
            .map(|&p| {
                let r = q / p;
                mul_mod(r, inv_mod(r % p, p).expect("square-free"), q)
            })
            .collect();
        Ok(Self {
            q,
            primes,
            idempotents,
        })
    }

    pub(crate) fn coords(&self, x: u64) -> Vec<u64> {
        self.primes.iter().map(|&p| x % p).collect()
    }

    pub(crate) fn compose(&self, coords: &[u64]) -> u64 {
        coords
            .iter()
            .zip(&self.idempotents)
            .fold(0u64, |acc, (&c, &e)| {
                crate::arith::add_mod(acc, mul_mod(c, e, self.q), self.q)
            })
    }
}

impl CrtVector {
    pub fn new(modulus: &FactoredModulus, coords: Vec<u64>) -> Result<Self> {
        if !modulus.is_square_free() {
            return Err(Error::NotSquareFree(modulus.value()));
        }
        if coords.len() != modulus.factors().len() {
            return Err(invalid("one coordinate per prime factor required"));
        }
        let coords = coords
            .iter()
            .zip(modulus.primes())
            .map(|(&c, p)| c % p)
            .collect();
        Ok(Self {
            modulus: modulus.clone(),
            coords,
        })
    }

    pub fn from_residue(modulus: &FactoredModulus, x: u64) -> Result<Self> {
        let basis = CrtBasis::new(modulus)?;
        Ok(Self {
            modulus: modulus.clone(),
            coords: basis.coords(x % modulus.value()),
        })
    }

    pub fn to_residue(&self) -> u64 {
        CrtBasis::new(&self.modulus)
            .expect("validated")
            .compose(&self.coords)
    }
}

/// `D(v) = {b : 0 <= b_p <= v_p for every p | q}`.
pub fn downset_d(v: &CrtVector) -> Result<ResidueSet> {
    let basis = CrtBasis::new(&v.modulus)?;
    let mut out = ResidueSet::empty(&v.modulus)?;
    let mut cur = vec![0u64; v.coords.len()];
    loop {
        out.insert(basis.compose(&cur));
        let mut i = 0;
        loop {
            if i == cur.len() {
                return Ok(out);
            }
            if cur[i] < v.coords[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// `u(A)` together with the raw counts `r(A, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperBound {
    /// `u(A) = r(A, p) mod p` per prime.
    pub vector: CrtVector,
    /// `r(A, p)`, the number of residues mod `p` occurring in `A`.
    pub counts: Vec<u64>,
    /// Primes with `r(A, p) = p`, where the coordinate wraps to 0. Never
    /// happens for `A` inside the unit group.
    pub wrapped: Vec<u64>,
}

pub fn u_of(a: &ResidueSet) -> Result<UpperBound> {
    if a.is_empty() {
        return Err(invalid("u(A) undefined for empty A"));
    }
    let modulus = a.modulus();
    if !modulus.is_square_free() {
        return Err(Error::NotSquareFree(modulus.value()));
    }
    let mut counts = Vec::new();
    let mut wrapped = Vec::new();
    for p in modulus.primes() {
        let mut seen = vec![false; p as usize];
        for x in a.iter() {
            seen[(x % p) as usize] = true;
        }
        let r = seen.iter().filter(|&&s| s).count() as u64;
        if r == p {
            wrapped.push(p);
        }
        counts.push(r);
    }
    let vector = CrtVector::new(modulus, counts.clone())?;
    Ok(UpperBound {
        vector,
        counts,
        wrapped,
    })
}

/// Whether every coordinate of `x` is strictly below the bound `u`.
pub fn is_upper_bound_for(u: &CrtVector, a: &ResidueSet) -> Result<bool> {
    let basis = CrtBasis::new(&u.modulus)?;
    Ok(a.iter()
        .all(|x| basis.coords(x).iter().zip(&u.coords).all(|(c, b)| c < b)))
}

/// Closed under lowering any single coordinate by one (equivalently, under `D`).
pub fn is_downset(a: &ResidueSet) -> Result<bool> {
    let basis = CrtBasis::new(a.modulus())?;
    for x in a.iter() {
        let mut c = basis.coords(x);
        for i in 0..c.len() {
            if c[i] > 0 {
                c[i] -= 1;
                let lower = basis.compose(&c);
                c[i] += 1;
                if !a.contains(lower) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Compresses one set along the coordinate of `basis.primes[idx]`.
fn compress(a: &ResidueSet, basis: &CrtBasis, idx: usize) -> ResidueSet {
    let p = basis.primes[idx];
    // fiber key: the residue with the p-coordinate zeroed
    let mut fibers: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
    for x in a.iter() {
        let mut c = basis.coords(x);
        c[idx] = 0;
        *fibers.entry(basis.compose(&c)).or_default() += 1;
    }
    let mut out = ResidueSet::empty(a.modulus()).expect("same modulus");
    let step = basis.idempotents[idx];
    for (base, size) in fibers {
        debug_assert!(size <= p);
        let mut y = base;
        for _ in 0..size {
            out.insert(y);
            y = crate::arith::add_mod(y, step, basis.q);
        }
    }
    out
}

/// Compresses every block along each prime of `q` in increasing order.
pub fn downset_transform(blocks: &[ResidueSet]) -> Result<Vec<ResidueSet>> {
    let first = blocks.first().ok_or_else(|| invalid("no blocks"))?;
    let basis = CrtBasis::new(first.modulus())?;
    for b in blocks {
        first.check_same_modulus(b)?;
    }
    Ok(blocks
        .iter()
        .map(|b| (0..basis.primes.len()).fold(b.clone(), |acc, i| compress(&acc, &basis, i)))
        .collect())
}
