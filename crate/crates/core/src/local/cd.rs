//! Cauchy–Davenport type bounds checked on concrete sets:
//!
//! * quantitative: `|S_eta(A, B)| >= min(p, |A| + |B| - 1) - 3 sqrt(eta) p`
//!   whenever `|A|, |B| >= sqrt(eta) p`;
//! * generalized: `1_{B_1} * ... * 1_{B_s}(n) > 0` on all of `Z_p` when
//!   `sum |B_i| > (1 + eps) p`, `|B_i| > (eps/s) p`, `eps > 2s/p`;
//! * Cochrane: `|A_1 + ... + A_n| >= min(q, (1/2 + 1/2n) sum |A_i|)` for
//!   blocks not contained in a coset of a proper subgroup.

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime};
use crate::error::{invalid, Error, Result};
use crate::local::sumset::{
    count_threshold, cyclic_convolution, sum_of_blocks, thresholded_sumset,
};
use crate::residue::FactoredModulus;
use crate::residue_set::ResidueSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub holds: bool,
    pub lhs: i64,
    pub rhs: i64,
}

/// `min(p, a + b - 1) - ceil(3 sqrt(eta) p)`.
pub fn quantitative_cd_rhs(p: u64, a: usize, b: usize, eta: f64) -> i64 {
    let slack = (3.0 * eta.sqrt() * p as f64 - 1e-9).ceil() as i64;
    (p as i64).min(a as i64 + b as i64 - 1) - slack
}

/// Whether `|A|, |B| >= sqrt(eta) p`.
pub fn quantitative_cd_applies(p: u64, a: usize, b: usize, eta: f64) -> bool {
    let need = eta.sqrt() * p as f64 - 1e-9;
    a as f64 >= need && b as f64 >= need && a > 0 && b > 0
}

fn check_prime_modulus(p: u64, sets: &[&ResidueSet]) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    for s in sets {
        if s.q() != p {
            return Err(Error::ModulusMismatch(s.q(), p));
        }
    }
    Ok(())
}

pub fn verify_quantitative_cd(
    p: u64,
    a: &ResidueSet,
    b: &ResidueSet,
    eta: f64,
) -> Result<BoundCheck> {
    check_prime_modulus(p, &[a, b])?;
    if !quantitative_cd_applies(p, a.len(), b.len(), eta) {
        return Err(Error::Precondition {
            name: "|A|, |B| >= sqrt(eta) p".into(),
            measured: a.len().min(b.len()) as f64,
            required: eta.sqrt() * p as f64,
        });
    }
    let lhs = thresholded_sumset(a, b, eta)?.len() as i64;
    let rhs = quantitative_cd_rhs(p, a.len(), b.len(), eta);
    Ok(BoundCheck {
        holds: lhs >= rhs,
        lhs,
        rhs,
    })
}

/// The same check on sets packed into the low `p` bits of a word (`p < 64`),
/// for exhaustive sweeps. Returns `None` when the preconditions fail.
pub fn quantitative_cd_masks(p: u64, a: u64, b: u64, eta: f64) -> Option<BoundCheck> {
    debug_assert!(p < 64);
    let (la, lb) = (a.count_ones() as usize, b.count_ones() as usize);
    if !quantitative_cd_applies(p, la, lb, eta) {
        return None;
    }
    let full = (1u64 << p) - 1;
    let t = count_threshold(eta, p as f64).max(1);
    // 1_A * 1_B(n) = |A ∩ (n - B)|; n - B is the reflection of B rotated by n.
    let mut reflected = 0u64;
    for x in 0..p {
        if b >> x & 1 == 1 {
            reflected |= 1 << ((p - x) % p);
        }
    }
    let mut lhs = 0i64;
    let mut rot = reflected;
    for _ in 0..p {
        if u64::from((a & rot).count_ones()) >= t {
            lhs += 1;
        }
        rot = ((rot << 1) | (rot >> (p - 1))) & full;
    }
    let rhs = quantitative_cd_rhs(p, la, lb, eta);
    Some(BoundCheck {
        holds: lhs >= rhs,
        lhs,
        rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenCdReport {
    /// `min_n 1_{B_1} * ... * 1_{B_s}(n)`.
    pub min_conv: u128,
    /// `eps' eta^(2(s-2)) p^(s-1)` with `eta = eps/6s^2`, `eps' = eps/4`, for comparison only.
    pub bound: f64,
    pub holds: bool,
}

pub fn verify_gen_cd(p: u64, blocks: &[ResidueSet], eps: f64) -> Result<GenCdReport> {
    let refs: Vec<&ResidueSet> = blocks.iter().collect();
    check_prime_modulus(p, &refs)?;
    let s = blocks.len();
    if s < 2 {
        return Err(invalid("need at least two blocks"));
    }
    let pf = p as f64;
    let sf = s as f64;
    if eps <= 2.0 * sf / pf {
        return Err(Error::Precondition {
            name: "eps > 2s/p".into(),
            measured: eps,
            required: 2.0 * sf / pf,
        });
    }
    let total: usize = blocks.iter().map(|b| b.len()).sum();
    if total as f64 <= (1.0 + eps) * pf {
        return Err(Error::Precondition {
            name: "sum |B_i| > (1 + eps) p".into(),
            measured: total as f64,
            required: (1.0 + eps) * pf,
        });
    }
    if let Some(small) = blocks
        .iter()
        .map(|b| b.len())
        .min()
        .filter(|&m| m as f64 <= eps / sf * pf)
    {
        return Err(Error::Precondition {
            name: "|B_i| > (eps/s) p".into(),
            measured: small as f64,
            required: eps / sf * pf,
        });
    }
    let mut conv: Vec<u128> = cyclic_convolution(&blocks[0], &blocks[1])?
        .into_iter()
        .map(u128::from)
        .collect();
    for block in &blocks[2..] {
        let members = block.to_vec();
        let mut next = vec![0u128; p as usize];
        for (n, &c) in conv.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &b in &members {
                let m = (n as u64 + b) % p;
                next[m as usize] = next[m as usize]
                    .checked_add(c)
                    .ok_or(Error::Overflow("s-fold convolution"))?;
            }
        }
        conv = next;
    }
    let min_conv = conv.iter().copied().min().unwrap_or(0);
    let eta = eps / (6.0 * sf * sf);
    let bound = eps / 4.0 * eta.powi(2 * (s as i32 - 2)) * pf.powi(s as i32 - 1);
    Ok(GenCdReport {
        min_conv,
        bound,
        holds: min_conv > 0,
    })
}

/// The divisor `d = gcd(q, {b - b_0 : b in B})`; the block lies in the coset
/// `b_0 + d Z_q`, which is proper exactly when `d > 1`.
pub fn coset_divisor(block: &ResidueSet) -> Option<u64> {
    let q = block.q();
    let mut it = block.iter();
    let b0 = it.next()?;
    Some(it.fold(q, |g, b| gcd(g, b - b0)))
}

pub fn cochrane_check(q: &FactoredModulus, blocks: &[ResidueSet]) -> Result<BoundCheck> {
    if blocks.is_empty() {
        return Err(invalid("no blocks"));
    }
    for b in blocks {
        if b.q() != q.value() {
            return Err(Error::ModulusMismatch(b.q(), q.value()));
        }
        match coset_divisor(b) {
            None => return Err(invalid("empty block")),
            Some(d) if d > 1 => {
                return Err(Error::CosetCondition {
                    modulus: q.value(),
                    divisor: d,
                })
            }
            Some(_) => {}
        }
    }
    let n = blocks.len() as i64;
    let total: i64 = blocks.iter().map(|b| b.len() as i64).sum();
    // ceil((1/2 + 1/2n) * total) = ceil((n + 1) total / 2n)
    let bound = ((n + 1) * total + 2 * n - 1) / (2 * n);
    let rhs = (q.value() as i64).min(bound);
    let lhs = sum_of_blocks(blocks)?.len() as i64;
    Ok(BoundCheck {
        holds: lhs >= rhs,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::factorize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(q: u64, xs: &[u64]) -> ResidueSet {
        ResidueSet::from_residues(&factorize(q).unwrap(), xs.iter().copied()).unwrap()
    }

    fn mask_set(p: u64, mask: u64) -> ResidueSet {
        set(
            p,
            &(0..p).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn quantitative_examples() {
        let full = ResidueSet::full(&factorize(13).unwrap()).unwrap();
        let r = verify_quantitative_cd(13, &full, &full, 0.04).unwrap();
        assert_eq!(r.lhs, 13);
        assert!(r.holds);
        let one = set(101, &[1]);
        let r = verify_quantitative_cd(101, &one, &one, 1e-5).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (1, 0, true));
        assert!(matches!(
            verify_quantitative_cd(11, &set(11, &[1]), &set(11, &[2]), 0.25),
            Err(Error::Precondition { .. })
        ));
        assert!(verify_quantitative_cd(9, &set(9, &[1]), &set(9, &[1]), 0.01).is_err());
    }

    #[test]
    fn exhaustive_p11_small_eta() {
        for a in 1u64..(1 << 11) {
            for b in (a..(1 << 11)).step_by(7) {
                if let Some(r) = quantitative_cd_masks(11, a, b, 0.01) {
                    assert!(r.holds, "{a:b} {b:b}");
                }
            }
        }
    }

    #[test]
    fn mask_path_matches_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [5u64, 7, 13, 31] {
            for _ in 0..200 {
                let a = rng.gen::<u64>() & ((1 << p) - 1);
                let b = rng.gen::<u64>() & ((1 << p) - 1);
                for eta in [0.25, 0.04, 0.01] {
                    let via_sets =
                        verify_quantitative_cd(p, &mask_set(p, a), &mask_set(p, b), eta).ok();
                    assert_eq!(quantitative_cd_masks(p, a, b, eta), via_sets);
                }
            }
        }
    }

    #[test]
    fn gen_cd_examples() {
        let full = ResidueSet::full(&factorize(101).unwrap()).unwrap();
        let r = verify_gen_cd(101, &[full.clone(), full.clone()], 0.5).unwrap();
        assert_eq!(r.min_conv, 101);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = factorize(101).unwrap();
        for _ in 0..20 {
            let blocks: Vec<ResidueSet> = (0..3)
                .map(|_| {
                    let mut s = ResidueSet::empty(&m).unwrap();
                    while s.len() < 40 {
                        s.insert(rng.gen_range(0..101));
                    }
                    s
                })
                .collect();
            let r = verify_gen_cd(101, &blocks, 0.1).unwrap();
            assert!(r.holds && r.bound > 0.0);
        }
        assert!(matches!(
            verify_gen_cd(101, &[full.clone(), full], 0.03),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn cochrane_examples() {
        let m15 = factorize(15).unwrap();
        let r = cochrane_check(&m15, &[set(15, &[0, 1]), set(15, &[0, 1])]).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (3, 3, true));
        let full = ResidueSet::full(&m15).unwrap();
        let r = cochrane_check(&m15, &[full.clone(), full]).unwrap();
        assert_eq!((r.lhs, r.rhs), (15, 15));
        let m9 = factorize(9).unwrap();
        assert_eq!(
            cochrane_check(&m9, &[set(9, &[0, 3, 6])]),
            Err(Error::CosetCondition {
                modulus: 9,
                divisor: 3
            })
        );
    }

    #[test]
    fn cochrane_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 2000 {
            let q = rng.gen_range(2..=100u64);
            let m = factorize(q).unwrap();
            let n = rng.gen_range(1..=4);
            let blocks: Vec<ResidueSet> = (0..n)
                .map(|_| {
                    let size = rng.gen_range(1..=q.min(12));
                    ResidueSet::from_residues(&m, (0..size).map(|_| rng.gen_range(0..q))).unwrap()
                })
                .collect();
            match cochrane_check(&m, &blocks) {
                Ok(r) => {
                    assert!(r.holds, "q={q} {blocks:?}");
                    checked += 1;
                }
                Err(Error::CosetCondition { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}
