//! Solubility of `x^k = a + c q (mod q^e)` for square-free `q` coprime to `k`,
//! by lifting simple roots prime by prime.

use crate::arith::{gcd, inv_mod, mul_mod, pow_mod};
use crate::error::{invalid, Error, Result};
use crate::residue::{unit_kth_power_classes, FactoredModulus};

/// Largest prime factor for which roots mod `p` are found by enumeration.
pub const MAX_ROOT_SEARCH_PRIME: u64 = 1 << 22;

/// Lifts a root of `x^k = t (mod p)` with `p ∤ k x` to a root mod `p^e`.
fn lift(mut x: u64, t: u64, k: u64, p: u64, e: u32) -> u64 {
    let mut modulus = p;
    for _ in 1..e {
        modulus *= p;
        let fx = (pow_mod(x, k, modulus) + modulus - t % modulus) % modulus;
        let dfx = mul_mod(k % modulus, pow_mod(x, k - 1, modulus), modulus);
        let inv = inv_mod(dfx, modulus).expect("simple root");
        x = (x + modulus - mul_mod(fx, inv, modulus)) % modulus;
    }
    x
}

/// Whether `x^k = a + c q (mod q^e)` has a solution.
pub fn hensel_solvable(a: u64, c: u64, q: &FactoredModulus, e: u32, k: u32) -> Result<bool> {
    let qv = q.value();
    if !q.is_square_free() {
        return Err(Error::NotSquareFree(qv));
    }
    if gcd(qv, k as u64) != 1 {
        return Err(Error::NotCoprime(qv, k as u64));
    }
    if e == 0 {
        return Err(invalid("e must be >= 1"));
    }
    if !unit_kth_power_classes(q, k)?.contains(a % qv) {
        return Err(invalid(format!("{a} is not in Z({qv})")));
    }
    let q_prev = qv.checked_pow(e - 1).ok_or(Error::Overflow("q^(e-1)"))?;
    let qe = q_prev.checked_mul(qv).ok_or(Error::Overflow("q^e"))?;
    if c >= q_prev {
        return Err(invalid(format!("c = {c} must be below q^(e-1) = {q_prev}")));
    }
    let target = ((a % qv) as u128 + c as u128 * qv as u128) as u64 % qe;
    for p in q.primes() {
        if p > MAX_ROOT_SEARCH_PRIME {
            return Err(Error::OutOfRange {
                what: "prime for root search",
                value: p,
                limit: MAX_ROOT_SEARCH_PRIME,
            });
        }
        let pe = p.pow(e);
        let t = target % pe;
        let Some(x0) = (1..p).find(|&x| pow_mod(x, k as u64, p) == t % p) else {
            return Ok(false);
        };
        let x = lift(x0, t, k as u64, p, e);
        if pow_mod(x, k as u64, pe) != t {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::factorize;

    fn brute(t: u64, k: u32, m: u64) -> bool {
        (0..m).any(|x| pow_mod(x, k as u64, m) == t % m)
    }

    #[test]
    fn examples() {
        let q7 = factorize(7).unwrap();
        assert!(hensel_solvable(2, 0, &q7, 1, 2).unwrap());
        for c in 0..7 {
            assert!(hensel_solvable(2, c, &q7, 2, 2).unwrap());
            assert!(brute(2 + 7 * c, 2, 49));
        }
        let q3 = factorize(3).unwrap();
        for c in 0..9 {
            assert!(hensel_solvable(1, c, &q3, 3, 2).unwrap());
            assert!(brute(1 + 3 * c, 2, 27));
        }
    }

    #[test]
    fn every_lift_is_soluble() {
        for (q, k) in [(15u64, 2u32), (35, 3), (7, 4), (11, 5), (77, 2)] {
            let m = factorize(q).unwrap();
            for e in 1..=3u32 {
                let qe = q.pow(e);
                for a in unit_kth_power_classes(&m, k).unwrap().iter() {
                    for c in 0..q.pow(e - 1) {
                        let ok = hensel_solvable(a, c, &m, e, k).unwrap();
                        assert!(ok);
                        if qe <= 3000 {
                            assert_eq!(ok, brute(a + c * q, k, qe));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn preconditions() {
        assert!(hensel_solvable(1, 0, &factorize(9).unwrap(), 2, 2).is_err());
        assert!(hensel_solvable(1, 0, &factorize(6).unwrap(), 2, 2).is_err());
        assert!(hensel_solvable(3, 0, &factorize(7).unwrap(), 2, 2).is_err());
        assert!(hensel_solvable(2, 7, &factorize(7).unwrap(), 2, 2).is_err());
    }
}
