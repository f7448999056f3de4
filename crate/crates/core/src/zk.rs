//! Certified enclosures of the density constant
//!
//! `Z_k = prod_p (1 + 1/|Z(p^k)|)`,
//!
//! the limit of `|Z_W^(k)| / |Z(W)|` as `w -> infinity`, together with the
//! zeta-quotient sandwich `zeta(k)/zeta(2k) <= Z_k <= zeta(k - log2 2k) /
//! zeta(2k - 2 log2 2k)` (upper bound only when `k - log2 2k > 1`).
//!
//! Tail bound. For a prime `p`, `|Z(p^k)| = p^(k-1)(p-1) / gcd(k, p^(k-1)(p-1))
//! >= p^(k-1)(p-1)/k >= (p-1)^k / k`, so with `log(1+x) <= x`
//!
//! `sum_{p > P} log(1 + 1/|Z(p^k)|) <= k sum_{m >= P} m^-k <= k / ((k-1)(P-1)^(k-1))`.
//!
//! Rounding. The truncated product is accumulated in `f64`; each factor
//! costs at most two roundings, so the relative error after `n` factors is
//! below `2n * 2^-53`. Both ends are padded by `max(1e-12, 2n * 2^-52)`
//! relative, which stands in for directed rounding.

use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd, mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Largest truncation point tried by [`zk_estimate`].
pub const MAX_TRUNCATION: u64 = 10_000_000;

const FIRST_TRUNCATION: u64 = 1 << 10;

/// Reference values to compare against, `(k, Z_k)` to three decimals.
pub const REFERENCE_TABLE: [(u32, f64); 8] = [
    (2, 3.279),
    (3, 1.493),
    (4, 1.570),
    (5, 1.071),
    (6, 1.075),
    (7, 1.016),
    (8, 1.062),
    (9, 1.004),
];

pub fn reference_value(k: u32) -> Option<f64> {
    REFERENCE_TABLE
        .iter()
        .find(|&&(j, _)| j == k)
        .map(|&(_, v)| v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZkEstimate {
    pub k: u32,
    pub lower: f64,
    pub upper: f64,
    pub truncation_prime: u64,
    pub tail_log_bound: f64,
}

impl ZkEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Which count of `|Z(p^k)|` enters the Euler product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitCount {
    /// `phi(p^k) / gcd(k, phi(p^k))` at every prime; reproduces the reference table.
    #[default]
    ClosedForm,
    /// The enumerated count; differs from the closed form only at `p = 2`
    /// for even `k >= 4`.
    Exact,
}

/// `|Z(p^k)|` as a float; exact whenever `p^k < 2^53`.
fn size_z_pk(p: u64, k: u32, count: UnitCount) -> f64 {
    let kk = k as u64;
    if p == 2 && count == UnitCount::Exact && k >= 3 {
        return crate::residue::size_z_exact(2, k, kk).expect("k <= 12") as f64;
    }
    // gcd(k, p^(k-1)(p-1)) = gcd(k, p^(k-1)(p-1) mod k)
    let phi_mod_k = mul_mod(pow_mod(p, kk - 1, kk), (p - 1) % kk, kk);
    let g = gcd(kk, phi_mod_k);
    (p as f64).powi(k as i32 - 1) * ((p - 1) as f64) / g as f64
}

/// `1 + 1/|Z(p^k)|` with `|Z(p^k)| = p^(k-1)(p-1) / gcd(k, p^(k-1)(p-1))`.
pub fn local_factor(p: u64, k: u32) -> f64 {
    local_factor_with(p, k, UnitCount::ClosedForm)
}

pub fn local_factor_with(p: u64, k: u32, count: UnitCount) -> f64 {
    assert!(k >= 2, "k must be >= 2");
    1.0 + 1.0 / size_z_pk(p, k, count)
}

/// `k / ((k-1)(P-1)^(k-1))`, an upper bound on the log of the tail beyond `P`.
pub fn tail_log_bound(k: u32, truncation: u64) -> f64 {
    let base = (truncation - 1) as f64;
    let b = k as f64 / ((k as f64 - 1.0) * base.powi(k as i32 - 1));
    b * (1.0 + 1e-12)
}

fn pad(n_factors: usize) -> f64 {
    (2.0 * n_factors as f64 * f64::EPSILON).max(1e-12)
}

fn check_k(k: u32) -> Result<()> {
    if !(2..=crate::residue::MAX_K).contains(&k) {
        return Err(Error::OutOfRange {
            what: "k",
            value: k as u64,
            limit: crate::residue::MAX_K as u64,
        });
    }
    Ok(())
}

struct Accumulator {
    k: u32,
    count: UnitCount,
    product: f64,
    factors: usize,
    primes: Vec<u64>,
    next: usize,
}

impl Accumulator {
    fn new(k: u32, count: UnitCount) -> Self {
        Self {
            k,
            count,
            product: 1.0,
            factors: 0,
            primes: Vec::new(),
            next: 0,
        }
    }

    fn advance_to(&mut self, truncation: u64) -> ZkEstimate {
        if self.primes.last().map_or(true, |&p| p < truncation) {
            self.primes = arith::primes_up_to(truncation);
        }
        while self.next < self.primes.len() && self.primes[self.next] <= truncation {
            self.product *= local_factor_with(self.primes[self.next], self.k, self.count);
            self.factors += 1;
            self.next += 1;
        }
        let rel = pad(self.factors);
        let tail = tail_log_bound(self.k, truncation);
        ZkEstimate {
            k: self.k,
            lower: (self.product * (1.0 - rel)).max(1.0),
            upper: self.product * tail.exp() * (1.0 + rel),
            truncation_prime: truncation,
            tail_log_bound: tail,
        }
    }
}

/// The enclosure obtained by truncating the Euler product at a fixed `P`.
pub fn zk_truncated(k: u32, truncation: u64) -> Result<ZkEstimate> {
    zk_truncated_with(k, truncation, UnitCount::ClosedForm)
}

pub fn zk_truncated_with(k: u32, truncation: u64, count: UnitCount) -> Result<ZkEstimate> {
    check_k(k)?;
    if truncation < 2 || truncation > MAX_TRUNCATION {
        return Err(Error::OutOfRange {
            what: "truncation prime",
            value: truncation,
            limit: MAX_TRUNCATION,
        });
    }
    Ok(Accumulator::new(k, count).advance_to(truncation))
}

/// Doubles `P` from 1024 until the enclosure is narrower than `precision`,
/// failing with the best enclosure once `P` would exceed [`MAX_TRUNCATION`].
pub fn zk_estimate(k: u32, precision: f64) -> Result<ZkEstimate> {
    zk_estimate_with(k, precision, UnitCount::ClosedForm)
}

/// The tail bound is the same for both counts: they agree at every `p > 2`.
pub fn zk_estimate_with(k: u32, precision: f64, count: UnitCount) -> Result<ZkEstimate> {
    check_k(k)?;
    if !(precision >= 1e-8) {
        return Err(Error::InvalidArgument(format!(
            "precision {precision} below 1e-8"
        )));
    }
    let mut acc = Accumulator::new(k, count);
    let mut truncation = FIRST_TRUNCATION;
    loop {
        let est = acc.advance_to(truncation);
        if est.width() <= precision {
            return Ok(est);
        }
        if truncation == MAX_TRUNCATION {
            return Err(Error::PrecisionUnreached {
                requested: precision,
                prime: truncation,
                lower: est.lower,
                upper: est.upper,
            });
        }
        truncation = (truncation * 2).min(MAX_TRUNCATION);
    }
}

const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Riemann zeta for real `s > 1`: direct sum to `n = 63` plus the
/// Euler–Maclaurin tail with eight Bernoulli corrections. Absolute error is
/// far below `1e-12` for `s >= 1.01`.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta(s) needs s > 1");
    const N: f64 = 64.0;
    let mut sum = 0.0;
    for n in (1..64).rev() {
        sum += (n as f64).powf(-s);
    }
    sum += N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    // T_j = B_2j / (2j)! * s(s+1)...(s+2j-2) * N^(-s-2j+1)
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = N.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        sum += b / fact * rising * npow;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        fact *= (m + 3.0) * (m + 4.0);
        npow /= N * N;
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaSandwich {
    pub lower: f64,
    pub upper: Option<f64>,
}

/// `zeta(k)/zeta(2k)` and, when `k - log2(2k) > 1`, `zeta(k - log2 2k) / zeta(2k - 2 log2 2k)`.
pub fn zeta_sandwich(k: u32) -> ZetaSandwich {
    assert!(k >= 2, "k must be >= 2");
    let kf = k as f64;
    let lower = zeta(kf) / zeta(2.0 * kf);
    let e = kf - (2.0 * kf).log2();
    let upper = (e > 1.0).then(|| zeta(e) / zeta(2.0 * e));
    ZetaSandwich { lower, upper }
}
