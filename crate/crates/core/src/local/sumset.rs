//! Cyclic sumsets, convolution counts `1_A * 1_B` in `Z_q`, and the
//! thresholded sumsets `S_eta(A, B) = {n : 1_A * 1_B(n) >= eta N}`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::convolution::exact_convolve;
use crate::error::{invalid, Error, Result};
use crate::residue_set::ResidueSet;

/// Slack when comparing an integer count against a real threshold.
const THRESHOLD_SLACK: f64 = 1e-9;

pub fn sumset(a: &ResidueSet, b: &ResidueSet) -> Result<ResidueSet> {
    a.sumset(b)
}

/// `sA` by binary doubling.
pub fn iterated_sumset(a: &ResidueSet, s: u64) -> Result<ResidueSet> {
    if s == 0 {
        return Err(invalid("s must be >= 1"));
    }
    let mut result: Option<ResidueSet> = None;
    let mut power = a.clone();
    let mut s = s;
    loop {
        if s & 1 == 1 {
            result = Some(match result {
                None => power.clone(),
                Some(r) => r.sumset(&power)?,
            });
        }
        s >>= 1;
        if s == 0 {
            break;
        }
        power = power.sumset(&power)?;
    }
    Ok(result.expect("s >= 1"))
}

/// `A_1 + ... + A_n` for blocks over one modulus.
pub fn sum_of_blocks(blocks: &[ResidueSet]) -> Result<ResidueSet> {
    let (first, rest) = blocks.split_first().ok_or_else(|| invalid("no blocks"))?;
    rest.iter().try_fold(first.clone(), |acc, b| acc.sumset(b))
}

/// `c(n) = #{(a, b) in A x B : a + b = n (mod q)}`.
pub fn cyclic_convolution(a: &ResidueSet, b: &ResidueSet) -> Result<Vec<u64>> {
    a.check_same_modulus(b)?;
    let q = a.q() as usize;
    let (la, lb) = (a.len(), b.len());
    if q <= 4096 || la.saturating_mul(lb) <= 1 << 22 {
        let mut counts = vec![0u64; q];
        let (small, large) = if la <= lb { (a, b) } else { (b, a) };
        let large: Vec<u64> = large.to_vec();
        for x in small.iter() {
            for &y in &large {
                let n = x + y;
                counts[if n >= q as u64 {
                    (n - q as u64) as usize
                } else {
                    n as usize
                }] += 1;
            }
        }
        return Ok(counts);
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(q);
    let inv = planner.plan_fft_inverse(q);
    let load = |s: &ResidueSet| {
        let mut v = vec![Complex64::new(0.0, 0.0); q];
        for r in s.iter() {
            v[r as usize].re = 1.0;
        }
        v
    };
    let mut fa = load(a);
    let mut fb = load(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    Ok(fa
        .iter()
        .map(|c| (c.re / q as f64).round().max(0.0) as u64)
        .collect())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eta = {eta} outside (0, 1]"
        )));
    }
    Ok(())
}

/// The smallest integer count `c` with `c >= eta * scale` (up to rounding slack).
pub(crate) fn count_threshold(eta: f64, scale: f64) -> u64 {
    (eta * scale - THRESHOLD_SLACK).ceil().max(0.0) as u64
}

/// Cyclic `S_eta(A, B)` with threshold `eta * q`.
pub fn thresholded_sumset(a: &ResidueSet, b: &ResidueSet, eta: f64) -> Result<ResidueSet> {
    check_eta(eta)?;
    let counts = cyclic_convolution(a, b)?;
    let t = count_threshold(eta, a.q() as f64).max(1);
    ResidueSet::from_residues(
        a.modulus(),
        counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c >= t)
            .map(|(n, _)| n as u64),
    )
}

/// `S_eta(A, B)` for `A, B` subsets of `[N]` with threshold `eta * N`.
pub fn thresholded_sumset_interval(a: &[u64], b: &[u64], n: u64, eta: f64) -> Result<Vec<u64>> {
    check_eta(eta)?;
    let indicator = |s: &[u64]| -> Result<Vec<u64>> {
        let mut v = vec![0u64; n as usize + 1];
        for &x in s {
            if x == 0 || x > n {
                return Err(Error::InvalidArgument(format!("{x} not in [1, {n}]")));
            }
            v[x as usize] = 1;
        }
        Ok(v)
    };
    let conv = exact_convolve(&indicator(a)?, &indicator(b)?)?;
    let t = count_threshold(eta, n as f64).max(1);
    Ok(conv
        .values
        .iter()
        .enumerate()
        .filter(|(_, &c)| c >= t)
        .map(|(m, _)| m as u64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::factorize;
    use proptest::prelude::*;

    fn set(q: u64, xs: &[u64]) -> ResidueSet {
        ResidueSet::from_residues(&factorize(q).unwrap(), xs.iter().copied()).unwrap()
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(
            sumset(&set(5, &[0]), &set(5, &[0])).unwrap().to_vec(),
            vec![0]
        );
        assert_eq!(
            sumset(&set(5, &[1, 4]), &set(5, &[1, 4])).unwrap().to_vec(),
            vec![0, 2, 3]
        );
        let full = ResidueSet::full(&factorize(12).unwrap()).unwrap();
        assert!(sumset(&set(12, &[7]), &full).unwrap().is_full());
        assert!(sumset(&set(5, &[1]), &set(7, &[1])).is_err());
    }

    #[test]
    fn iterated_examples() {
        let a = set(5, &[1, 4]);
        assert_eq!(iterated_sumset(&a, 1).unwrap(), a);
        assert!(iterated_sumset(&a, 4).unwrap().is_full());
        assert_eq!(iterated_sumset(&a, 3).unwrap().to_vec(), vec![1, 2, 3, 4]);
        assert_eq!(
            iterated_sumset(&set(9, &[1, 4, 7]), 2).unwrap().to_vec(),
            vec![2, 5, 8]
        );
        assert!(iterated_sumset(&a, 0).is_err());
    }

    #[test]
    fn thresholded_examples() {
        let a = set(7, &[1, 2, 3]);
        assert_eq!(
            cyclic_convolution(&a, &a).unwrap(),
            vec![0, 0, 1, 2, 3, 2, 1]
        );
        assert_eq!(
            thresholded_sumset(&a, &a, 2.0 / 7.0).unwrap().to_vec(),
            vec![3, 4, 5]
        );
        assert_eq!(
            thresholded_sumset(&a, &a, 1e-9).unwrap(),
            sumset(&a, &a).unwrap()
        );
        let full = ResidueSet::full(&factorize(11).unwrap()).unwrap();
        assert!(thresholded_sumset(&full, &full, 1.0).unwrap().is_full());
    }

    #[test]
    fn interval_threshold() {
        let a = [1u64, 2, 3];
        assert_eq!(
            thresholded_sumset_interval(&a, &a, 10, 0.2).unwrap(),
            vec![3, 4, 5]
        );
        assert_eq!(
            thresholded_sumset_interval(&a, &a, 10, 0.01).unwrap(),
            vec![2, 3, 4, 5, 6]
        );
    }

    #[test]
    fn fft_path_matches_direct() {
        let q = 1u64 << 13;
        let m = factorize(q).unwrap();
        let a = ResidueSet::from_residues(&m, (0..3000).map(|i| i * 7 % q)).unwrap();
        let b = ResidueSet::from_residues(&m, (0..2500).map(|i| i * 13 % q + 1)).unwrap();
        let fast = cyclic_convolution(&a, &b).unwrap();
        let mut slow = vec![0u64; q as usize];
        for x in a.iter() {
            for y in b.iter() {
                slow[((x + y) % q) as usize] += 1;
            }
        }
        assert_eq!(fast, slow);
    }

    proptest! {
        #[test]
        fn iterated_is_associative(q in 2u64..80, xs in prop::collection::vec(0u64..80, 1..6), s in 1u64..6, t in 1u64..6) {
            let a = set(q, &xs);
            let lhs = iterated_sumset(&a, s + t).unwrap();
            let rhs = sumset(&iterated_sumset(&a, s).unwrap(), &iterated_sumset(&a, t).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
