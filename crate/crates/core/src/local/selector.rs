//! Witness extraction for sumset membership, and the selector that turns a
//! function `f: Z(W) -> [0, 1)` with mean above 1/2 into summands
//! `b_1, ..., b_s` with `sum b_i = n (mod W)`, every `f(b_i) > 0` and
//! `sum f(b_i) > s/2`.
//!
//! The selector follows the averaging argument: with `mu = max f` attained at
//! `b*` and `lambda = 1 - mu`, the set `A = {f > lambda}` has more than half of
//! `Z(W)`; `s' = 8k omega(k) + 2k + 2` summands are taken from `A` to
//! represent `n - (s - s') b*`, and the remaining `s - s'` summands are `b*`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::residue::{KContext, WContext};
use crate::residue_set::ResidueSet;

/// `a_1, ..., a_s in A` with `sum a_i = n (mod q)`, or `None` iff `n` is not
/// in `sA`. Layers `L_j = L_(j-1) + A` are kept as bitsets and walked back
/// from `n`, taking the smallest admissible element at each step.
pub fn solve_representation(a: &ResidueSet, s: u64, n: u64) -> Result<Option<Vec<u64>>> {
    if s == 0 {
        return Err(Error::InvalidArgument("s must be >= 1".into()));
    }
    let q = a.q();
    let n = n % q;
    let mut layers = Vec::with_capacity(s as usize + 1);
    let mut zero = ResidueSet::empty(a.modulus())?;
    zero.insert(0);
    layers.push(zero);
    for j in 1..=s as usize {
        let next = layers[j - 1].sumset(a)?;
        layers.push(next);
    }
    if !layers[s as usize].contains(n) {
        return Ok(None);
    }
    let members = a.to_vec();
    let mut out = Vec::with_capacity(s as usize);
    let mut x = n;
    for j in (1..=s as usize).rev() {
        let pick = members
            .iter()
            .copied()
            .find(|&m| layers[j - 1].contains((x + q - m) % q))
            .expect("layer invariant");
        out.push(pick);
        x = (x + q - pick) % q;
    }
    debug_assert_eq!(x, 0);
    Ok(Some(out))
}

fn precondition(name: &str, measured: f64, required: f64) -> Error {
    Error::Precondition {
        name: name.into(),
        measured,
        required,
    }
}

/// Returns `s` elements of `Z(W)`; missing keys of `f` count as 0.
pub fn mean_condition_selector(
    f: &BTreeMap<u64, f64>,
    n: u64,
    s: u64,
    wctx: &WContext,
    kctx: &KContext,
) -> Result<Vec<u64>> {
    if wctx.k != kctx.k {
        return Err(Error::InvalidArgument("k differs between contexts".into()));
    }
    let w = wctx.value();
    let z = wctx.units()?;
    for (&b, &v) in f {
        if !z.contains(b) {
            return Err(Error::InvalidArgument(format!("{b} is not in Z({w})")));
        }
        if !(0.0..1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!(
                "f({b}) = {v} outside [0, 1)"
            )));
        }
    }
    let value = |b: u64| f.get(&b).copied().unwrap_or(0.0);
    let mean = z.iter().map(value).sum::<f64>() / z.len() as f64;
    if mean <= 0.5 {
        return Err(precondition("mean of f over Z(W) > 1/2", mean, 0.5));
    }
    let threshold = kctx.selector_threshold();
    if s < threshold {
        return Err(precondition(
            "s >= 16k omega(k) + 4k + 4",
            s as f64,
            threshold as f64,
        ));
    }
    let d = kctx.forced_modulus(w);
    if n % d != s % d {
        return Err(precondition(
            "n = s mod gcd(R_k, W)",
            (n % d) as f64,
            (s % d) as f64,
        ));
    }
    // first maximizer in increasing order
    let (b_star, mu) = z
        .iter()
        .map(|b| (b, value(b)))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );
    let lambda = 1.0 - mu;
    let a = ResidueSet::from_residues(wctx.modulus(), z.iter().filter(|&b| value(b) > lambda))?;
    let s1 = kctx.local_threshold();
    let s2 = s - s1;
    let rest = (n % w + w - (s2 as u128 * b_star as u128 % w as u128) as u64) % w;
    let Some(mut picks) = solve_representation(&a, s1, rest)? else {
        return Err(Error::RepresentationFailed(format!(
            "{rest} is not a sum of {s1} elements of the threshold set (|A| = {}, |Z(W)| = {}, lambda = {lambda})",
            a.len(),
            z.len()
        )));
    };
    picks.extend(std::iter::repeat(b_star).take(s2 as usize));
    let total: f64 = picks.iter().map(|&b| value(b)).sum();
    if total <= s as f64 / 2.0 || picks.iter().any(|&b| value(b) <= 0.0) {
        return Err(Error::RepresentationFailed(format!(
            "selection has sum f = {total} for s = {s}"
        )));
    }
    Ok(picks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::sumset::iterated_sumset;
    use crate::residue::{build_k_context, factorize};
    use proptest::prelude::*;

    fn set(q: u64, xs: &[u64]) -> ResidueSet {
        ResidueSet::from_residues(&factorize(q).unwrap(), xs.iter().copied()).unwrap()
    }

    #[test]
    fn representation_examples() {
        assert_eq!(
            solve_representation(&set(5, &[1, 4]), 1, 4).unwrap(),
            Some(vec![4])
        );
        let r = solve_representation(&set(5, &[1, 4]), 4, 0)
            .unwrap()
            .unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r.iter().sum::<u64>() % 5, 0);
        assert_eq!(solve_representation(&set(5, &[1, 4]), 3, 0).unwrap(), None);
    }

    #[test]
    fn selector_w36() {
        let w = WContext::new(2, 3).unwrap();
        let k = build_k_context(2).unwrap();
        let f: BTreeMap<u64, f64> = [(1, 0.9), (13, 0.8), (25, 0.7)].into_iter().collect();
        for n in (0..36).filter(|n| n % 12 == 44 % 12) {
            let picks = mean_condition_selector(&f, n, 44, &w, &k).unwrap();
            assert_eq!(picks.len(), 44);
            assert_eq!(picks.iter().sum::<u64>() % 36, n);
            assert!(picks.iter().map(|b| f[b]).sum::<f64>() > 22.0);
        }
        let constant: BTreeMap<u64, f64> = [(1, 0.6), (13, 0.6), (25, 0.6)].into_iter().collect();
        let picks = mean_condition_selector(&constant, 8, 44, &w, &k).unwrap();
        assert!((picks.iter().map(|b| constant[b]).sum::<f64>() - 44.0 * 0.6).abs() < 1e-9);
    }

    #[test]
    fn selector_gates() {
        let w = WContext::new(2, 3).unwrap();
        let k = build_k_context(2).unwrap();
        let low: BTreeMap<u64, f64> = [(1, 0.5), (13, 0.5), (25, 0.5)].into_iter().collect();
        assert!(matches!(
            mean_condition_selector(&low, 8, 44, &w, &k),
            Err(Error::Precondition { .. })
        ));
        let f: BTreeMap<u64, f64> = [(1, 0.9), (13, 0.8), (25, 0.7)].into_iter().collect();
        assert!(matches!(
            mean_condition_selector(&f, 9, 44, &w, &k),
            Err(Error::Precondition { .. })
        ));
        assert!(matches!(
            mean_condition_selector(&f, 8, 20, &w, &k),
            Err(Error::Precondition { .. })
        ));
        let bad: BTreeMap<u64, f64> = [(5, 0.9)].into_iter().collect();
        assert!(mean_condition_selector(&bad, 8, 44, &w, &k).is_err());
    }

    proptest! {
        #[test]
        fn representation_matches_sumset(q in 2u64..60, xs in prop::collection::vec(0u64..60, 1..5), s in 1u64..6, n in 0u64..60) {
            let a = set(q, &xs);
            let reach = iterated_sumset(&a, s).unwrap();
            let rep = solve_representation(&a, s, n).unwrap();
            prop_assert_eq!(rep.is_some(), reach.contains(n % q));
            if let Some(r) = rep {
                prop_assert_eq!(r.len() as u64, s);
                prop_assert!(r.iter().all(|&x| a.contains(x)));
                prop_assert_eq!(r.iter().sum::<u64>() % q, n % q);
            }
        }
    }
}
