//! Waring pairs. `(q, s)` is a Waring pair (for the exponent `k`) when every
//! `A ⊆ Z(q)` with `|A| > |Z(q)|/2` satisfies `sA = {a : a = s mod gcd(R_k, q)}`.
//!
//! Since every element of `Z(q)` is `1 mod gcd(R_k, q)`, `sA` always lies
//! inside the target class, so a failure is always a missing element. The
//! property is monotone in `s` and in `A`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::sumset::iterated_sumset;
use crate::residue::{unit_kth_power_classes, FactoredModulus, KContext};
use crate::residue_set::ResidueSet;

/// Largest `|Z(q)|` the exhaustive check accepts.
pub const EXHAUSTIVE_CAP: usize = 24;

const CHUNK: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub set: Vec<u64>,
    pub missing: u64,
}

impl Counterexample {
    /// Recomputes `sA` by brute force and confirms `missing` is absent from it
    /// while lying in the target class.
    pub fn recheck(&self, q: u64, s: u64, forced_modulus: u64) -> bool {
        if self.missing % forced_modulus != s % forced_modulus {
            return false;
        }
        let mut reach = vec![false; q as usize];
        reach[0] = true;
        for _ in 0..s {
            let mut next = vec![false; q as usize];
            for (x, _) in reach.iter().enumerate().filter(|(_, &r)| r) {
                for &a in &self.set {
                    next[((x as u64 + a) % q) as usize] = true;
                }
            }
            reach = next;
        }
        !reach[self.missing as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaringPairReport {
    pub q: FactoredModulus,
    pub s: u64,
    pub k: u32,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    pub sets_checked: u64,
    /// `|Z(q)|`.
    pub z_size: usize,
    /// `gcd(R_k, q)`.
    pub forced_modulus: u64,
    pub exhaustive: bool,
}

/// `{a in Z_q : a = s mod d}`.
pub fn target_class(q: &FactoredModulus, s: u64, d: u64) -> Result<ResidueSet> {
    let r = s % d;
    ResidueSet::from_residues(q, (0..q.value()).filter(|a| a % d == r))
}

struct Problem<'a> {
    q: &'a FactoredModulus,
    s: u64,
    z: Vec<u64>,
    target: ResidueSet,
}

impl Problem<'_> {
    fn subset(&self, mask: u64) -> ResidueSet {
        let mut a = ResidueSet::empty(self.q).expect("validated modulus");
        for (i, &z) in self.z.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a.insert(z);
            }
        }
        a
    }

    fn check(&self, a: &ResidueSet) -> Option<u64> {
        let sums = iterated_sumset(a, self.s).expect("s >= 1");
        debug_assert!(sums.is_subset(&self.target), "sA left the forced class");
        self.target.iter().find(|&t| !sums.contains(t))
    }

    fn is_majority(&self, mask: u64) -> bool {
        2 * mask.count_ones() as usize > self.z.len()
    }
}

fn problem<'a>(q: &'a FactoredModulus, s: u64, ctx: &KContext) -> Result<Problem<'a>> {
    if s == 0 {
        return Err(Error::InvalidArgument("s must be >= 1".into()));
    }
    let z = unit_kth_power_classes(q, ctx.k)?.to_vec();
    let target = target_class(q, s, ctx.forced_modulus(q.value()))?;
    Ok(Problem { q, s, z, target })
}

fn report(
    p: &Problem<'_>,
    ctx: &KContext,
    counterexample: Option<Counterexample>,
    sets_checked: u64,
    exhaustive: bool,
) -> WaringPairReport {
    WaringPairReport {
        q: p.q.clone(),
        s: p.s,
        k: ctx.k,
        holds: counterexample.is_none(),
        counterexample,
        sets_checked,
        z_size: p.z.len(),
        forced_modulus: ctx.forced_modulus(p.q.value()),
        exhaustive,
    }
}

/// Checks every majority subset of `Z(q)`, enumerated as bitmasks over the
/// sorted elements of `Z(q)`. Chunks run in parallel; the reported
/// counterexample is the first one in mask order regardless of scheduling.
pub fn waring_pair_exhaustive(
    q: &FactoredModulus,
    s: u64,
    ctx: &KContext,
) -> Result<WaringPairReport> {
    let p = problem(q, s, ctx)?;
    exhaustive_on(p, ctx)
}

fn exhaustive_on(p: Problem<'_>, ctx: &KContext) -> Result<WaringPairReport> {
    let m = p.z.len();
    if m > EXHAUSTIVE_CAP {
        return Err(Error::ExhaustiveRange {
            size: m,
            cap: EXHAUSTIVE_CAP,
        });
    }
    let total = 1u64 << m;
    let chunks = total.div_ceil(CHUNK);
    let first_failure = (0..chunks).into_par_iter().find_map_first(|c| {
        (c * CHUNK..((c + 1) * CHUNK).min(total))
            .filter(|&mask| p.is_majority(mask))
            .find_map(|mask| p.check(&p.subset(mask)).map(|missing| (mask, missing)))
    });
    let (counterexample, checked) = match first_failure {
        Some((mask, missing)) => {
            let checked = (0..=mask).filter(|&x| p.is_majority(x)).count() as u64;
            (
                Some(Counterexample {
                    set: p.subset(mask).to_vec(),
                    missing,
                }),
                checked,
            )
        }
        None => (
            None,
            (0..total).filter(|&x| p.is_majority(x)).count() as u64,
        ),
    };
    Ok(report(&p, ctx, counterexample, checked, true))
}

/// Same verdict as [`waring_pair_exhaustive`], with the elements of `Z(q)`
/// enumerated in a caller-chosen order.
pub fn waring_pair_exhaustive_permuted(
    q: &FactoredModulus,
    s: u64,
    ctx: &KContext,
    order: &[usize],
) -> Result<WaringPairReport> {
    let mut p = problem(q, s, ctx)?;
    if order.len() != p.z.len() {
        return Err(Error::InvalidArgument(
            "permutation length differs from |Z(q)|".into(),
        ));
    }
    p.z = order.iter().map(|&i| p.z[i]).collect();
    exhaustive_on(p, ctx)
}

/// Samples `trials` majority subsets uniformly (each element kept with
/// probability 1/2, non-majority draws rejected). One-sided evidence only.
pub fn waring_pair_random(
    q: &FactoredModulus,
    s: u64,
    ctx: &KContext,
    trials: u64,
    seed: u64,
) -> Result<WaringPairReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let p = problem(q, s, ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexample = None;
    let mut checked = 0;
    for _ in 0..trials {
        let a = loop {
            let mut a = ResidueSet::empty(q)?;
            for &z in &p.z {
                if rng.gen::<bool>() {
                    a.insert(z);
                }
            }
            if 2 * a.len() > p.z.len() {
                break a;
            }
        };
        checked += 1;
        if let Some(missing) = p.check(&a) {
            counterexample = Some(Counterexample {
                set: a.to_vec(),
                missing,
            });
            break;
        }
    }
    Ok(report(&p, ctx, counterexample, checked, false))
}

/// Exhaustive when `|Z(q)|` allows it, otherwise randomized.
pub fn waring_pair_auto(
    q: &FactoredModulus,
    s: u64,
    ctx: &KContext,
    trials: u64,
    seed: u64,
) -> Result<WaringPairReport> {
    match waring_pair_exhaustive(q, s, ctx) {
        Err(Error::ExhaustiveRange { .. }) => waring_pair_random(q, s, ctx, trials, seed),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalS {
    pub s: u64,
    /// The report at `s` (holds).
    pub certificate: WaringPairReport,
    /// The report at `s - 1` (fails), absent when `s = 1`.
    pub below: Option<WaringPairReport>,
}

/// Smallest `s <= s_max` for which `(q, s)` is a Waring pair, with the
/// exhaustive reports at `s` and `s - 1` as certificates.
pub fn minimal_s(q: &FactoredModulus, ctx: &KContext, s_max: u64) -> Result<Option<MinimalS>> {
    let mut below = None;
    for s in 1..=s_max {
        let r = waring_pair_exhaustive(q, s, ctx)?;
        if r.holds {
            return Ok(Some(MinimalS {
                s,
                certificate: r,
                below,
            }));
        }
        below = Some(r);
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombineReport {
    pub first: WaringPairReport,
    pub second: WaringPairReport,
    pub combined: WaringPairReport,
    pub holds: bool,
}

/// Verifies `(q, s)` and `(r, t)`, then checks `(qr, s + t)` directly.
pub fn combine_waring_pairs_check(
    q: &FactoredModulus,
    r: &FactoredModulus,
    s: u64,
    t: u64,
    ctx: &KContext,
    trials: u64,
    seed: u64,
) -> Result<CombineReport> {
    let qr = q.coprime_product(r)?;
    let first = waring_pair_auto(q, s, ctx, trials, seed)?;
    let second = waring_pair_auto(r, t, ctx, trials, seed)?;
    for rep in [&first, &second] {
        if !rep.holds {
            return Err(Error::Precondition {
                name: format!("({}, {}) is a Waring pair", rep.q.value(), rep.s),
                measured: 0.0,
                required: 1.0,
            });
        }
    }
    let combined = waring_pair_auto(&qr, s + t, ctx, trials, seed)?;
    let holds = combined.holds;
    Ok(CombineReport {
        first,
        second,
        combined,
        holds,
    })
}
