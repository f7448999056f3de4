//! Linear convolution of sequences indexed from 0.
//!
//! Two engines: a complex FFT (rustfft) for real-valued data, and an exact
//! engine for nonnegative integers that runs either a direct sparse loop or a
//! number-theoretic transform over three NTT primes recombined by Garner's
//! algorithm. Exact results that do not fit in `u64` saturate and set a flag.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Longest output the engines will allocate.
pub const MAX_CONVOLUTION_LEN: usize = 1 << 26;

fn output_len(lens: impl Iterator<Item = usize>) -> Result<usize> {
    let mut total = 1usize;
    for l in lens {
        if l == 0 {
            return Ok(0);
        }
        total = total
            .checked_add(l - 1)
            .ok_or(Error::Overflow("convolution length"))?;
    }
    if total > MAX_CONVOLUTION_LEN {
        return Err(Error::OutOfRange {
            what: "convolution length",
            value: total as u64,
            limit: MAX_CONVOLUTION_LEN as u64,
        });
    }
    Ok(total)
}

/// `(f_1 * ... * f_s)(n) = sum_{n_1 + ... + n_s = n} prod f_i(n_i)` by one
/// forward transform per input and a single inverse transform.
pub fn fft_convolve_many(fs: &[&[f64]]) -> Result<Vec<f64>> {
    if fs.is_empty() {
        return Err(Error::InvalidArgument("nothing to convolve".into()));
    }
    let out_len = output_len(fs.iter().map(|f| f.len()))?;
    if out_len == 0 {
        return Ok(Vec::new());
    }
    if fs.len() == 1 {
        return Ok(fs[0].to_vec());
    }
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut acc = vec![Complex64::new(1.0, 0.0); size];
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    for f in fs {
        buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for (b, &x) in buf.iter_mut().zip(f.iter()) {
            b.re = x;
        }
        fwd.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a *= b;
        }
    }
    inv.process(&mut acc);
    let scale = 1.0 / size as f64;
    Ok(acc[..out_len].iter().map(|c| c.re * scale).collect())
}

pub fn fft_convolve(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    fft_convolve_many(&[a, b])
}

/// Direct `O(len(a) len(b))` convolution, the oracle for the fast paths.
pub fn direct_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// An exact convolution; entries that exceed `u64::MAX` are clamped to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactConvolution {
    pub values: Vec<u64>,
    pub saturated: bool,
}

const NTT_PRIMES: [u64; 3] = [998_244_353, 167_772_161, 469_762_049];
const NTT_ROOT: u64 = 3;

fn pow_m(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn ntt(a: &mut [u64], invert: bool, m: u64) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_m(NTT_ROOT, (m - 1) / len as u64, m);
        if invert {
            w = pow_m(w, m - 2, m);
        }
        for chunk in a.chunks_mut(len) {
            let mut wn = 1u64;
            let (lo, hi) = chunk.split_at_mut(len / 2);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let x = *u;
                let y = *v * wn % m;
                *u = if x + y >= m { x + y - m } else { x + y };
                *v = if x >= y { x - y } else { x + m - y };
                wn = wn * w % m;
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = pow_m(n as u64, m - 2, m);
        a.iter_mut().for_each(|x| *x = *x * n_inv % m);
    }
}

fn ntt_convolve_mod(a: &[u64], b: &[u64], size: usize, m: u64) -> Vec<u64> {
    let mut fa = vec![0u64; size];
    let mut fb = vec![0u64; size];
    for (d, &x) in fa.iter_mut().zip(a) {
        *d = x % m;
    }
    for (d, &x) in fb.iter_mut().zip(b) {
        *d = x % m;
    }
    ntt(&mut fa, false, m);
    ntt(&mut fb, false, m);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % m;
    }
    ntt(&mut fa, true, m);
    fa
}

/// Garner reconstruction of `x mod p0 p1 p2` from its three residues.
fn garner(r: [u64; 3]) -> u128 {
    let [p0, p1, p2] = NTT_PRIMES;
    let inv_p0_mod_p1 = pow_m(p0, p1 - 2, p1);
    let p0p1_mod_p2 = p0 % p2 * (p1 % p2) % p2;
    let inv_p0p1_mod_p2 = pow_m(p0p1_mod_p2, p2 - 2, p2);
    let x0 = r[0];
    let x1 = (r[1] + p1 - x0 % p1) % p1 * inv_p0_mod_p1 % p1;
    let partial = (x0 + x1 % p2 * (p0 % p2)) % p2;
    let x2 = (r[2] + p2 - partial) % p2 * inv_p0p1_mod_p2 % p2;
    x0 as u128 + x1 as u128 * p0 as u128 + x2 as u128 * p0 as u128 * p1 as u128
}

fn direct_exact(a: &[u64], b: &[u64], out_len: usize) -> ExactConvolution {
    let mut acc = vec![0u128; out_len];
    let nz_b: Vec<(usize, u64)> = b
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, y)| y != 0)
        .collect();
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for &(j, y) in &nz_b {
            acc[i + j] = acc[i + j].saturating_add(x as u128 * y as u128);
        }
    }
    clamp(acc)
}

fn clamp(acc: Vec<u128>) -> ExactConvolution {
    let mut saturated = false;
    let values = acc
        .into_iter()
        .map(|v| {
            u64::try_from(v).unwrap_or_else(|_| {
                saturated = true;
                u64::MAX
            })
        })
        .collect();
    ExactConvolution { values, saturated }
}

/// Exact convolution of nonnegative integer sequences. The NTT path is used
/// only when every output entry is provably below `p0 p1 p2 ~ 2^86`.
pub fn exact_convolve(a: &[u64], b: &[u64]) -> Result<ExactConvolution> {
    let out_len = output_len([a.len(), b.len()].into_iter())?;
    if out_len == 0 {
        return Ok(ExactConvolution {
            values: Vec::new(),
            saturated: false,
        });
    }
    let nnz_a = a.iter().filter(|&&x| x != 0).count();
    let nnz_b = b.iter().filter(|&&x| x != 0).count();
    let max_a = a.iter().copied().max().unwrap_or(0) as u128;
    let max_b = b.iter().copied().max().unwrap_or(0) as u128;
    let bound = max_a
        .saturating_mul(max_b)
        .saturating_mul(nnz_a.min(nnz_b) as u128);
    let modulus = NTT_PRIMES.iter().map(|&p| p as u128).product::<u128>();
    let size = out_len.next_power_of_two();
    let direct_cost = nnz_a as u128 * nnz_b as u128;
    let ntt_cost = 3 * 3 * size as u128 * (size.trailing_zeros() as u128 + 1);
    if bound >= modulus || direct_cost <= ntt_cost || size > (1 << 23) {
        return Ok(direct_exact(a, b, out_len));
    }
    let residues: Vec<Vec<u64>> = NTT_PRIMES
        .iter()
        .map(|&m| ntt_convolve_mod(a, b, size, m))
        .collect();
    let acc = (0..out_len)
        .map(|i| garner([residues[0][i], residues[1][i], residues[2][i]]))
        .collect();
    Ok(clamp(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn deltas_and_tent() {
        let d1 = [0.0, 1.0];
        let c = fft_convolve(&d1, &d1).unwrap();
        assert!((c[2] - 1.0).abs() < 1e-12 && c[0].abs() < 1e-12 && c[1].abs() < 1e-12);
        let n = 50usize;
        let mut ind = vec![1.0; n + 1];
        ind[0] = 0.0;
        let c = fft_convolve(&ind, &ind).unwrap();
        for m in 2..=2 * n {
            let tent = n as f64 - (m as f64 - (n as f64 + 1.0)).abs();
            assert!((c[m] - tent).abs() < 1e-9, "n={m}");
        }
    }

    #[test]
    fn total_mass_multiplies() {
        let a: Vec<f64> = (0..100).map(|i| ((i * 7) % 13) as f64 / 13.0).collect();
        let b: Vec<f64> = (0..70).map(|i| ((i * 5) % 11) as f64).collect();
        let c = fft_convolve_many(&[&a, &b, &a]).unwrap();
        let mass = |v: &[f64]| v.iter().sum::<f64>();
        let expected = mass(&a) * mass(&b) * mass(&a);
        assert!((mass(&c) - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn garner_roundtrip() {
        for x in [0u128, 1, 998_244_352, 1 << 60, (1u128 << 85) + 12345] {
            let r = NTT_PRIMES.map(|p| (x % p as u128) as u64);
            assert_eq!(garner(r), x);
        }
    }

    #[test]
    fn exact_large_values_use_ntt() {
        let a: Vec<u64> = (0..5000)
            .map(|i| (i * 2_654_435_761u64) % 1_000_003)
            .collect();
        let b: Vec<u64> = (0..4000).map(|i| (i * 40_503u64) % 999_983).collect();
        let fast = exact_convolve(&a, &b).unwrap();
        let slow = direct_exact(&a, &b, a.len() + b.len() - 1);
        assert_eq!(fast, slow);
    }

    #[test]
    fn saturation_flagged() {
        let a = vec![u64::MAX, u64::MAX];
        let c = exact_convolve(&a, &a).unwrap();
        assert!(c.saturated);
        assert_eq!(c.values[1], u64::MAX);
    }

    proptest! {
        #[test]
        fn fast_matches_direct(a in prop::collection::vec(0u64..2, 1..64), b in prop::collection::vec(0u64..2, 1..64)) {
            let fa: Vec<f64> = a.iter().map(|&x| x as f64).collect();
            let fb: Vec<f64> = b.iter().map(|&x| x as f64).collect();
            let fast: Vec<u64> = fft_convolve(&fa, &fb).unwrap().iter().map(|x| x.round() as u64).collect();
            let direct: Vec<u64> = direct_convolve(&fa, &fb).iter().map(|&x| x as u64).collect();
            prop_assert_eq!(&fast, &direct);
            prop_assert_eq!(exact_convolve(&a, &b).unwrap().values, direct);
        }
    }
}
