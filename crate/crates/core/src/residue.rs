//! Exact residue arithmetic: factored moduli, the CRT, k-th power residue
//! classes and the arithmetic constants attached to `k`.
//!
//! Notation used throughout the crate:
//!
//! * `Z_q^(k) = {t^k mod q}`: all k-th power classes ([`kth_power_classes`]);
//! * `Z(q)`: the k-th power classes coprime to `q` ([`unit_kth_power_classes`]);
//! * `tau(k, p)`: the exponent of `p` in `k`;
//! * `eta(k, p)`: `tau + 2` for `p = 2 | k`, else `tau + 1`;
//! * `R_k = prod_{(p-1) | k} p^eta(k, p)`: every element of `Z(q)` is
//!   `1 mod gcd(R_k, q)`;
//! * `W = prod_{p <= w} p^k` and `sigma_W(b) = #{z in Z_W : z^k = b}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd, inv_mod, mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::residue_set::ResidueSet;

pub const MAX_MODULUS: u64 = i64::MAX as u64;

/// Largest prime power `p^k` whose root-count table is built by enumeration.
pub const MAX_SIGMA_PRIME_POWER: u64 = 1_000_000;

/// A modulus together with its prime-power factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoredModulus {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredModulus {
    /// Builds a modulus from a factor list, checking the invariants.
    pub fn from_factors(mut factors: Vec<(u64, u32)>) -> Result<Self> {
        factors.sort_unstable();
        let mut value = 1u64;
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument(format!("repeated prime {}", w[0].0)));
            }
        }
        for &(p, e) in &factors {
            if e == 0 || !arith::is_prime(p) {
                return Err(Error::InvalidArgument(format!("bad factor {p}^{e}")));
            }
            let pe = p.checked_pow(e).ok_or(Error::Overflow("modulus"))?;
            value = value.checked_mul(pe).ok_or(Error::Overflow("modulus"))?;
        }
        if value > MAX_MODULUS {
            return Err(Error::OutOfRange {
                what: "modulus",
                value,
                limit: MAX_MODULUS,
            });
        }
        Ok(Self { value, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// The prime powers `p^e` exactly dividing the modulus.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, e)| p.pow(e)).collect()
    }

    pub fn is_square_free(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// `q^e`.
    pub fn pow(&self, e: u32) -> Result<Self> {
        if e == 0 {
            return Self::from_factors(Vec::new());
        }
        Self::from_factors(
            self.factors
                .iter()
                .map(|&(p, x)| {
                    x.checked_mul(e)
                        .map(|x| (p, x))
                        .ok_or(Error::Overflow("exponent"))
                })
                .collect::<Result<_>>()?,
        )
    }

    /// Product of two coprime moduli.
    pub fn coprime_product(&self, other: &Self) -> Result<Self> {
        if gcd(self.value, other.value) != 1 {
            return Err(Error::NotCoprime(self.value, other.value));
        }
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        Self::from_factors(f)
    }

    /// Product of two arbitrary moduli.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut map: BTreeMap<u64, u32> = BTreeMap::new();
        for &(p, e) in self.factors.iter().chain(&other.factors) {
            *map.entry(p).or_default() += e;
        }
        Self::from_factors(map.into_iter().collect())
    }
}

/// Factors `1 <= n <= 2^63 - 1` (trial division by small primes, then
/// Miller–Rabin and Pollard rho).
pub fn factorize(n: u64) -> Result<FactoredModulus> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    if n > MAX_MODULUS {
        return Err(Error::OutOfRange {
            what: "modulus",
            value: n,
            limit: MAX_MODULUS,
        });
    }
    let mut rest = n;
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while rest % p == 0 {
            primes.push(p);
            rest /= p;
        }
    }
    arith::prime_factors(rest, &mut primes);
    let mut map: BTreeMap<u64, u32> = BTreeMap::new();
    for p in primes {
        *map.entry(p).or_default() += 1;
    }
    Ok(FactoredModulus {
        value: n,
        factors: map.into_iter().collect(),
    })
}

/// The exponent `tau` with `p^tau || k`.
pub fn tau(k: u64, p: u64) -> u32 {
    assert!(k >= 1 && p >= 2);
    let mut t = 0;
    let mut k = k;
    while k % p == 0 {
        k /= p;
        t += 1;
    }
    t
}

/// `eta(k, p)`; only defined for primes with `(p - 1) | k`.
pub fn eta(k: u32, p: u64) -> Result<u32> {
    if p < 2 || k as u64 % (p - 1) != 0 {
        return Err(Error::EtaUndefined { k, p });
    }
    let t = tau(k as u64, p);
    Ok(if p == 2 && t > 0 { t + 2 } else { t + 1 })
}

/// Number of distinct prime divisors.
pub fn omega(n: u64) -> u32 {
    factorize(n).map(|f| f.factors().len() as u32).unwrap_or(0)
}

/// Constants attached to the exponent `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KContext {
    pub k: u32,
    pub eta_table: BTreeMap<u64, u32>,
    pub r_k: u64,
    pub omega_k: u32,
}

pub const MAX_K: u32 = 12;

pub fn build_k_context(k: u32) -> Result<KContext> {
    if !(2..=MAX_K).contains(&k) {
        return Err(Error::OutOfRange {
            what: "k",
            value: k as u64,
            limit: MAX_K as u64,
        });
    }
    // (p - 1) | k forces p <= k + 1.
    let mut eta_table = BTreeMap::new();
    let mut r_k = 1u64;
    for p in arith::primes_up_to(k as u64 + 1) {
        if k as u64 % (p - 1) == 0 {
            let e = eta(k, p)?;
            eta_table.insert(p, e);
            r_k *= p.pow(e);
        }
    }
    Ok(KContext {
        k,
        eta_table,
        r_k,
        omega_k: omega(k as u64),
    })
}

impl KContext {
    /// `gcd(R_k, q)`, the modulus of the forced congruence inside `Z_q`.
    pub fn forced_modulus(&self, q: u64) -> u64 {
        gcd(self.r_k, q)
    }

    /// `16 k omega(k) + 4k + 4`, the summand count of the mean-condition selector.
    pub fn selector_threshold(&self) -> u64 {
        16 * self.k as u64 * self.omega_k as u64 + 4 * self.k as u64 + 4
    }

    /// `8 k omega(k) + 2k + 2`, the summand count of the local problem.
    pub fn local_threshold(&self) -> u64 {
        8 * self.k as u64 * self.omega_k as u64 + 2 * self.k as u64 + 2
    }
}

/// `{t^k mod p^e}` as a membership vector of length `p^e`.
fn local_power_classes(pe: u64, k: u32, units_only: bool, p: u64) -> Vec<u64> {
    let mut seen = vec![false; pe as usize];
    for t in 0..pe {
        if units_only && t % p == 0 {
            continue;
        }
        seen[pow_mod(t, k as u64, pe) as usize] = true;
    }
    seen.iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(i, _)| i as u64)
        .collect()
}

/// CRT product `{x mod m1*m2 : x mod m1 in s1, x mod m2 in s2}`.
fn crt_product(s1: &[u64], m1: u64, s2: &[u64], m2: u64) -> Vec<u64> {
    let m = m1 * m2;
    let e1 = mul_mod(m2, inv_mod(m2 % m1, m1).unwrap_or(0), m);
    let e2 = mul_mod(m1, inv_mod(m1 % m2, m2).unwrap_or(0), m);
    let mut out = Vec::with_capacity(s1.len() * s2.len());
    for &a in s1 {
        let ca = mul_mod(a, e1, m);
        for &b in s2 {
            out.push(arith::add_mod(ca, mul_mod(b, e2, m), m));
        }
    }
    out
}

fn power_classes(q: &FactoredModulus, k: u32, units_only: bool) -> Result<ResidueSet> {
    let mut set = ResidueSet::empty(q)?;
    let mut acc: Vec<u64> = vec![0];
    let mut m = 1u64;
    for &(p, e) in q.factors() {
        let pe = p.pow(e);
        let local = local_power_classes(pe, k, units_only, p);
        acc = crt_product(&acc, m, &local, pe);
        m *= pe;
    }
    for r in acc {
        set.insert(r);
    }
    Ok(set)
}

/// `Z_q^(k)`: every k-th power class modulo `q`, computed per prime power and
/// CRT-combined.
pub fn kth_power_classes(q: &FactoredModulus, k: u32) -> Result<ResidueSet> {
    power_classes(q, k, false)
}

/// `Z(q)`: the k-th power classes coprime to `q`.
pub fn unit_kth_power_classes(q: &FactoredModulus, k: u32) -> Result<ResidueSet> {
    power_classes(q, k, true)
}

/// The closed form `phi(p^e) / gcd(k, phi(p^e))`.
///
/// This is `|Z(p^e)|` whenever the unit group mod `p^e` is cyclic, i.e. for odd
/// `p` and for `p^e <= 4`. For `p = 2`, `e >= 3` and even `k` it is twice the
/// true count; see [`size_z_exact`].
pub fn size_z_formula(p: u64, e: u32, k: u64) -> Result<u64> {
    if e == 0 {
        return Err(Error::InvalidArgument("exponent must be >= 1".into()));
    }
    let phi = arith::phi_prime_power(p, e).ok_or(Error::Overflow("phi(p^e)"))?;
    Ok(phi / gcd(k, phi))
}

/// `|Z(p^e)|` from the structure of the unit group: cyclic of order
/// `phi(p^e)` for odd `p`, and `C_2 x C_(2^(e-2))` for `p = 2`, `e >= 3`.
pub fn size_z_exact(p: u64, e: u32, k: u64) -> Result<u64> {
    if p != 2 || e <= 2 {
        return size_z_formula(p, e, k);
    }
    let big = 1u64
        .checked_shl(e - 2)
        .filter(|_| e - 2 < 64)
        .ok_or(Error::Overflow("2^(e-2)"))?;
    Ok(if k % 2 == 1 {
        2 * big
    } else {
        big / gcd(k, big)
    })
}

/// `#{b in Z_(p^k)^(k) : b = a (mod p)}` by enumeration, for `a in Z(p)`.
pub fn coset_count(p: u64, k: u32, a: u64) -> Result<u64> {
    if !arith::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let m = factorize(p)?.pow(k)?;
    Ok(kth_power_classes(&m, k)?
        .iter()
        .filter(|b| b % p == a % p)
        .count() as u64)
}

/// The predicted coset size `p^(k - 1 - tau(k, p))` for odd `p`.
pub fn coset_count_formula(p: u64, k: u32) -> Result<u64> {
    let t = tau(k as u64, p);
    let e = (k - 1)
        .checked_sub(t)
        .ok_or(Error::InvalidArgument(format!("tau({k}, {p}) = {t} >= k")))?;
    p.checked_pow(e).ok_or(Error::Overflow("p^(k-1-tau)"))
}

/// `|Z(q)|`, multiplicative over the prime powers of `q`.
pub fn size_z(q: &FactoredModulus, k: u64) -> Result<u64> {
    q.factors().iter().try_fold(1u64, |acc, &(p, e)| {
        acc.checked_mul(size_z_exact(p, e, k)?)
            .ok_or(Error::Overflow("|Z(q)|"))
    })
}

/// The W-trick modulus and its k-th root counts.
#[derive(Clone, Debug)]
pub struct WContext {
    pub k: u32,
    pub w: u64,
    modulus: FactoredModulus,
    /// `(p^k, counts)` with `counts[r] = #{z mod p^k : z^k = r}`.
    root_tables: Vec<(u64, Vec<u32>)>,
}

impl WContext {
    pub fn new(k: u32, w: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument("k must be >= 2".into()));
        }
        if w < 2 {
            return Err(Error::InvalidArgument("w must be >= 2".into()));
        }
        let primes = arith::primes_up_to(w);
        let mut root_tables = Vec::with_capacity(primes.len());
        let mut factors = Vec::with_capacity(primes.len());
        for p in primes {
            let pk = p.checked_pow(k).ok_or(Error::Overflow("p^k"))?;
            if pk > MAX_SIGMA_PRIME_POWER {
                return Err(Error::OutOfRange {
                    what: "prime power p^k in W",
                    value: pk,
                    limit: MAX_SIGMA_PRIME_POWER,
                });
            }
            let mut counts = vec![0u32; pk as usize];
            for z in 0..pk {
                counts[pow_mod(z, k as u64, pk) as usize] += 1;
            }
            root_tables.push((pk, counts));
            factors.push((p, k));
        }
        let modulus = FactoredModulus::from_factors(factors)?;
        Ok(Self {
            k,
            w,
            modulus,
            root_tables,
        })
    }

    /// `W = prod_{p <= w} p^k`.
    pub fn modulus(&self) -> &FactoredModulus {
        &self.modulus
    }

    pub fn value(&self) -> u64 {
        self.modulus.value()
    }

    /// `sigma_W(b)`, the number of `z in Z_W` with `z^k = b (mod W)`.
    pub fn sigma(&self, b: u64) -> u64 {
        let b = b % self.value();
        self.root_tables
            .iter()
            .map(|(pk, counts)| counts[(b % pk) as usize] as u64)
            .product()
    }

    /// `sigma_W(b)` by direct enumeration of `Z_W`; for cross-checks on small `W`.
    pub fn sigma_by_enumeration(&self, b: u64) -> u64 {
        let w = self.value();
        let b = b % w;
        (0..w)
            .filter(|&z| pow_mod(z, self.k as u64, w) == b)
            .count() as u64
    }

    /// `Z(W)`.
    pub fn units(&self) -> Result<ResidueSet> {
        unit_kth_power_classes(&self.modulus, self.k)
    }
}

/// Solves the simultaneous congruences `x = r_i (mod m_i)` for pairwise
/// coprime moduli, returning `(x, prod m_i)`.
pub fn crt_combine(residues: &[(u64, FactoredModulus)]) -> Result<(u64, FactoredModulus)> {
    let mut acc_modulus = FactoredModulus::from_factors(Vec::new())?;
    let mut acc = 0u64;
    for (r, m) in residues {
        let m1 = acc_modulus.value();
        let m2 = m.value();
        let product = acc_modulus.coprime_product(m)?;
        acc = crt_pair(acc, m1, r % m2, m2);
        acc_modulus = product;
    }
    Ok((acc, acc_modulus))
}

/// `x mod m1*m2` with `x = a (mod m1)`, `x = b (mod m2)`, for coprime moduli.
pub(crate) fn crt_pair(a: u64, m1: u64, b: u64, m2: u64) -> u64 {
    let m = m1 as u128 * m2 as u128;
    let inv = inv_mod(m1 % m2, m2).expect("coprime moduli") as u128;
    // x = a + m1 * ((b - a) * m1^{-1} mod m2)
    let diff = (b as i128 - (a % m2) as i128).rem_euclid(m2 as i128) as u128;
    let t = diff * inv % m2 as u128;
    ((a as u128 + m1 as u128 * t) % m) as u64
}
