//! `J_t^(k)(X)`: the number of `(x_1, ..., x_2t) in [1, X]^(2t)` with
//! `sum_{i <= t} x_i^j = sum_{i <= t} x_(t+i)^j` for `j = 1, ..., k`.
//!
//! Counted by a hash join over ordered t-tuples and, independently, by
//! sorted multisets weighted by their number of orderings. A literal
//! enumeration of all 2t-tuples serves as oracle where it is small.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const MAX_T: u32 = 4;
pub const MAX_K: u32 = 3;
pub const MAX_X: u64 = 30;
/// Largest `X^(2t)` the literal enumeration accepts.
pub const MAX_BRUTE_TUPLES: u64 = 20_000_000;

fn check(t: u32, k: u32, x: u64) -> Result<()> {
    for (what, value, limit) in [
        ("t", t as u64, MAX_T as u64),
        ("k", k as u64, MAX_K as u64),
        ("X", x, MAX_X),
    ] {
        if value == 0 || value > limit {
            return Err(Error::OutOfRange { what, value, limit });
        }
    }
    Ok(())
}

/// Power sums packed 21 bits per degree; each sum is below `4 * 30^3 < 2^21`.
fn key(xs: &[u64], k: u32) -> u64 {
    (1..=k).fold(0, |acc, j| {
        (acc << 21) | xs.iter().map(|x| x.pow(j)).sum::<u64>()
    })
}

/// Steps `xs` to the next tuple in `[1, X]^len`; false after the last one.
fn advance(xs: &mut [u64], x: u64) -> bool {
    for v in xs.iter_mut().rev() {
        if *v < x {
            *v += 1;
            return true;
        }
        *v = 1;
    }
    false
}

pub fn vinogradov_count(t: u32, k: u32, x: u64) -> Result<u64> {
    check(t, k, x)?;
    let mut counts: HashMap<u64, u64> = HashMap::new();
    let mut xs = vec![1; t as usize];
    loop {
        *counts.entry(key(&xs, k)).or_default() += 1;
        if !advance(&mut xs, x) {
            break;
        }
    }
    Ok(counts.values().map(|c| c * c).sum())
}

fn multisets(
    x: u64,
    t: usize,
    start: u64,
    cur: &mut Vec<u64>,
    k: u32,
    fact: &[u64],
    out: &mut Vec<(u64, u64)>,
) {
    if cur.len() == t {
        let mut weight = fact[t];
        let mut run = 1;
        for i in 1..=t {
            if i < t && cur[i] == cur[i - 1] {
                run += 1;
            } else {
                weight /= fact[run];
                run = 1;
            }
        }
        out.push((key(cur, k), weight));
        return;
    }
    for v in start..=x {
        cur.push(v);
        multisets(x, t, v, cur, k, fact, out);
        cur.pop();
    }
}

/// The multiset counter: `J = sum_v (sum_{multisets with sums v} t! / prod m_i!)^2`,
/// grouped by sorting rather than hashing.
pub fn vinogradov_count_multiset(t: u32, k: u32, x: u64) -> Result<u64> {
    check(t, k, x)?;
    let fact: Vec<u64> = (0..=t as u64)
        .scan(1, |f, i| {
            *f *= i.max(1);
            Some(*f)
        })
        .collect();
    let mut rows = Vec::new();
    multisets(
        x,
        t as usize,
        1,
        &mut Vec::with_capacity(t as usize),
        k,
        &fact,
        &mut rows,
    );
    rows.sort_unstable();
    let mut total = 0;
    let mut i = 0;
    while i < rows.len() {
        let mut group = 0;
        let mut j = i;
        while j < rows.len() && rows[j].0 == rows[i].0 {
            group += rows[j].1;
            j += 1;
        }
        total += group * group;
        i = j;
    }
    Ok(total)
}

/// Literal enumeration of all `X^(2t)` tuples.
pub fn vinogradov_count_brute(t: u32, k: u32, x: u64) -> Result<u64> {
    check(t, k, x)?;
    let size = x.pow(2 * t);
    if size > MAX_BRUTE_TUPLES {
        return Err(Error::OutOfRange {
            what: "X^(2t)",
            value: size,
            limit: MAX_BRUTE_TUPLES,
        });
    }
    let t = t as usize;
    let mut xs: Vec<u64> = vec![1; 2 * t];
    let mut count = 0;
    loop {
        if (1..=k).all(|j| {
            xs[..t].iter().map(|v| v.pow(j)).sum::<u64>()
                == xs[t..].iter().map(|v| v.pow(j)).sum::<u64>()
        }) {
            count += 1;
        }
        if !advance(&mut xs, x) {
            break;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(vinogradov_count(2, 1, 3).unwrap(), 19);
        assert_eq!(vinogradov_count_multiset(2, 1, 3).unwrap(), 19);
        assert_eq!(vinogradov_count_brute(2, 1, 3).unwrap(), 19);
        for k in 1..=3 {
            for x in 1..=30 {
                assert_eq!(vinogradov_count(1, k, x).unwrap(), x);
            }
        }
        // t = k: only permutations solve the system
        assert_eq!(
            vinogradov_count(2, 2, 5).unwrap(),
            vinogradov_count_brute(2, 2, 5).unwrap()
        );
        assert!(vinogradov_count(5, 1, 3).is_err());
        assert!(vinogradov_count(2, 1, 31).is_err());
    }

    #[test]
    fn counters_agree_with_brute() {
        for t in 1..=4u32 {
            for k in 1..=3u32 {
                for x in 1..=30u64 {
                    if x.pow(2 * t) > 2_000_000 {
                        continue;
                    }
                    let b = vinogradov_count_brute(t, k, x).unwrap();
                    assert_eq!(vinogradov_count(t, k, x).unwrap(), b);
                    assert_eq!(vinogradov_count_multiset(t, k, x).unwrap(), b);
                }
            }
        }
    }

    #[test]
    fn diagonal_lower_bound() {
        for t in 1..=4u32 {
            let tf: u64 = (1..=t as u64).product();
            for x in [5u64, 12, 30] {
                let j = vinogradov_count_multiset(t, 3, x).unwrap();
                assert!(
                    j as f64 >= (x as f64).powi(t as i32) * tf as f64 / (t as f64).powi(t as i32)
                );
            }
        }
    }
}
