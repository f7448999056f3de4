//! Weighted sequences on `[N] = {1, ..., N}` and the W-tricked weights
//!
//! `f_b(n) = (k / sigma_W(b)) t^(k-1)` if `Wn + b = t^k` with `t^k in A`, else 0,
//!
//! with `nu_b` the same weight for `A` = all k-th powers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::residue::WContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    FB,
    NuB,
    Indicator,
    DenseModel,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceMeta {
    pub kind: SequenceKind,
    pub k: Option<u32>,
    pub w: Option<u64>,
    pub modulus: Option<u64>,
    pub b: Option<u64>,
}

impl SequenceMeta {
    pub fn plain(kind: SequenceKind) -> Self {
        Self {
            kind,
            k: None,
            w: None,
            modulus: None,
            b: None,
        }
    }
}

/// A nonnegative function on `[N]`; `values[n - 1] = f(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSequence {
    values: Vec<f64>,
    pub meta: SequenceMeta,
}

impl WeightedSequence {
    pub fn new(values: Vec<f64>, meta: SequenceMeta) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidArgument(format!(
                "value {v} at n = {} is not finite and >= 0",
                i + 1
            )));
        }
        Ok(Self { values, meta })
    }

    pub fn custom(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SequenceMeta::plain(SequenceKind::Custom))
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            meta: SequenceMeta::plain(SequenceKind::Custom),
        }
    }

    /// `1_[N]`.
    pub fn interval(n: usize) -> Self {
        Self {
            values: vec![1.0; n],
            meta: SequenceMeta::plain(SequenceKind::Indicator),
        }
    }

    /// The indicator of a subset of `[N]`.
    pub fn indicator<I: IntoIterator<Item = u64>>(n: usize, members: I) -> Result<Self> {
        let mut values = vec![0.0; n];
        for m in members {
            if m == 0 || m > n as u64 {
                return Err(Error::InvalidArgument(format!("{m} not in [1, {n}]")));
            }
            values[m as usize - 1] = 1.0;
        }
        Ok(Self {
            values,
            meta: SequenceMeta::plain(SequenceKind::Indicator),
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `f(n)`, zero outside `[N]`.
    pub fn get(&self, n: i64) -> f64 {
        if n >= 1 && (n as usize) <= self.values.len() {
            self.values[n as usize - 1]
        } else {
            0.0
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.sum() / self.values.len() as f64
        }
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i as u64 + 1)
    }

    /// `[0, f(1), ..., f(N)]`, the layout used by the convolution engines.
    pub fn padded(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.values.len() + 1);
        v.push(0.0);
        v.extend_from_slice(&self.values);
        v
    }
}

/// A set of k-th powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PowerSet {
    All,
    /// Explicit members, given as the powers `t^k` themselves.
    Explicit(BTreeSet<u64>),
}

impl PowerSet {
    pub fn contains(&self, power: u64) -> bool {
        match self {
            PowerSet::All => true,
            PowerSet::Explicit(s) => s.contains(&power),
        }
    }

    pub fn empty() -> Self {
        PowerSet::Explicit(BTreeSet::new())
    }
}

/// `floor(x^(1/k))`.
pub fn iroot(x: u64, k: u32) -> u64 {
    if x < 2 || k == 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / k as f64) as u64;
    while r > 0 && r.checked_pow(k).map_or(true, |v| v > x) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= x) {
        r += 1;
    }
    r
}

fn weights(
    a: &PowerSet,
    n: usize,
    ctx: &WContext,
    b: u64,
    kind: SequenceKind,
) -> Result<WeightedSequence> {
    let w = ctx.value();
    if b >= w {
        return Err(invalid(format!("b = {b} must lie in [0, {w})")));
    }
    let sigma = ctx.sigma(b);
    if sigma == 0 {
        return Err(Error::NotKthPower { b, modulus: w });
    }
    let k = ctx.k;
    let top = (w as u128 * n as u128 + b as u128).min(u64::MAX as u128) as u64;
    let lo = iroot(w + b - 1, k) + 1;
    let hi = iroot(top, k);
    let scale = k as f64 / sigma as f64;
    let mut values = vec![0.0; n];
    for t in lo..=hi {
        let p = t.pow(k);
        if p % w != b || !a.contains(p) {
            continue;
        }
        let m = (p - b) / w;
        values[m as usize - 1] = scale * (t as f64).powi(k as i32 - 1);
    }
    let meta = SequenceMeta {
        kind,
        k: Some(k),
        w: Some(ctx.w),
        modulus: Some(w),
        b: Some(b),
    };
    WeightedSequence::new(values, meta)
}

pub fn build_f_b(a: &PowerSet, n: usize, ctx: &WContext, b: u64) -> Result<WeightedSequence> {
    weights(a, n, ctx, b, SequenceKind::FB)
}

pub fn build_nu_b(n: usize, ctx: &WContext, b: u64) -> Result<WeightedSequence> {
    weights(&PowerSet::All, n, ctx, b, SequenceKind::NuB)
}

/// `g(b, M) = E_{n in [M]} f_b(n)`.
pub fn mean_g(a: &PowerSet, ctx: &WContext, b: u64, m_len: usize) -> Result<f64> {
    Ok(build_f_b(a, m_len, ctx, b)?.mean())
}
