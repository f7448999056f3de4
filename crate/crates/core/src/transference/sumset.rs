//! Convolutions of weighted sequences and the dense sumset lemma.

use serde::Serialize;

use crate::circle::WeightedSequence;
use crate::convolution::{exact_convolve, fft_convolve_many};
use crate::error::{invalid, Error, Result};

/// `(f_1 * ... * f_s)(n)` for `n in [0, sN]`, indexed by `n`.
pub fn convolution(fs: &[WeightedSequence]) -> Result<Vec<f64>> {
    if fs.len() < 2 {
        return Err(invalid("convolution needs at least two sequences"));
    }
    let padded: Vec<Vec<f64>> = fs.iter().map(|f| f.padded()).collect();
    let refs: Vec<&[f64]> = padded.iter().map(|v| v.as_slice()).collect();
    fft_convolve_many(&refs)
}

/// Exact counts `1_{A_1} * ... * 1_{A_s}(n)` for `n in [0, sN]`, and whether
/// any entry saturated.
pub fn indicator_convolution(blocks: &[Vec<u64>], n: u64) -> Result<(Vec<u64>, bool)> {
    if blocks.is_empty() {
        return Err(invalid("no blocks"));
    }
    let mut saturated = false;
    let mut acc: Option<Vec<u64>> = None;
    for block in blocks {
        let mut ind = vec![0u64; n as usize + 1];
        for &a in block {
            if a == 0 || a > n {
                return Err(invalid(format!("{a} not in [1, {n}]")));
            }
            ind[a as usize] = 1;
        }
        acc = Some(match acc {
            None => ind,
            Some(prev) => {
                let c = exact_convolve(&prev, &ind)?;
                saturated |= c.saturated;
                c.values
            }
        });
    }
    let mut values = acc.unwrap_or_default();
    values.resize(blocks.len() * n as usize + 1, 0);
    Ok((values, saturated))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowScan {
    /// Inclusive integer range strictly inside the real window.
    pub window: (u64, u64),
    pub min_count: u64,
    pub first_zero: Option<u64>,
    pub zeros: u64,
    pub holds: bool,
    pub saturated: bool,
}

/// Integers strictly between `lo` and `hi`.
pub fn open_window(lo: f64, hi: f64) -> (u64, u64) {
    let a = lo.floor() as u64 + 1;
    let b = if hi.fract() == 0.0 {
        hi as u64 - 1
    } else {
        hi.floor() as u64
    };
    (a, b)
}

/// `((1 - eps^2/16) sN/2, (1 + eps/4) sN/2)`.
pub fn dense_window(s: usize, n: u64, eps: f64) -> (u64, u64) {
    let mid = s as f64 * n as f64 / 2.0;
    open_window((1.0 - eps * eps / 16.0) * mid, (1.0 + eps / 4.0) * mid)
}

/// Positivity of the block convolution on the dense-lemma window, with no
/// check of the lemma's hypotheses.
pub fn dense_sumset_scan(blocks: &[Vec<u64>], n: u64, eps: f64) -> Result<WindowScan> {
    let (values, saturated) = indicator_convolution(blocks, n)?;
    let window = dense_window(blocks.len(), n, eps);
    let mut scan = WindowScan {
        window,
        min_count: u64::MAX,
        first_zero: None,
        zeros: 0,
        holds: true,
        saturated,
    };
    for m in window.0..=window.1.min(values.len() as u64 - 1) {
        let c = values[m as usize];
        scan.min_count = scan.min_count.min(c);
        if c == 0 {
            scan.zeros += 1;
            scan.first_zero.get_or_insert(m);
            scan.holds = false;
        }
    }
    if window.0 > window.1 {
        scan.min_count = 0;
    }
    Ok(scan)
}

/// The dense sumset lemma on `[N]`: requires `sum |A_i| > s(1 + eps)N/2` and
/// every `|A_i| > eps N / 2`.
pub fn dense_sumset_check(blocks: &[Vec<u64>], n: u64, eps: f64) -> Result<WindowScan> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps = {eps} must lie in (0, 1)")));
    }
    let s = blocks.len() as f64;
    let total: usize = blocks.iter().map(|b| b.len()).sum();
    let need = s * (1.0 + eps) * n as f64 / 2.0;
    if total as f64 <= need {
        return Err(Error::Precondition {
            name: "sum |A_i| > s(1 + eps)N/2".into(),
            measured: total as f64,
            required: need,
        });
    }
    for b in blocks {
        if b.len() as f64 <= eps * n as f64 / 2.0 {
            return Err(Error::Precondition {
                name: "|A_i| > eps N / 2".into(),
                measured: b.len() as f64,
                required: eps * n as f64 / 2.0,
            });
        }
    }
    dense_sumset_scan(blocks, n, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_and_tent() {
        let d = WeightedSequence::indicator(5, [1]).unwrap();
        let c = convolution(&[d.clone(), d]).unwrap();
        assert!(
            (c[2] - 1.0).abs() < 1e-12
                && c.iter().enumerate().all(|(i, x)| i == 2 || x.abs() < 1e-12)
        );
        let n = 50usize;
        let one = WeightedSequence::interval(n);
        let tent = convolution(&[one.clone(), one]).unwrap();
        for m in 2..=2 * n {
            let expect = n as f64 - (m as f64 - (n as f64 + 1.0)).abs();
            assert!((tent[m] - expect).abs() < 1e-9);
        }
        assert!(convolution(&[WeightedSequence::interval(3)]).is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(open_window(1.0, 4.0), (2, 3));
        assert_eq!(open_window(1.5, 4.5), (2, 4));
        assert_eq!(dense_window(3, 2000, 0.2), (2993, 3149));
    }

    #[test]
    fn full_blocks() {
        let all: Vec<u64> = (1..=200).collect();
        let r = dense_sumset_check(&[all.clone(), all.clone(), all], 200, 0.2).unwrap();
        assert!(r.holds && r.min_count > 10_000);
    }

    #[test]
    fn random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 2000u64;
        for _ in 0..10 {
            let blocks: Vec<Vec<u64>> = (0..3)
                .map(|_| (1..=n).filter(|_| rng.gen_bool(0.7)).collect())
                .collect();
            let r = dense_sumset_check(&blocks, n, 0.2).unwrap();
            assert!(r.holds);
        }
    }

    #[test]
    fn parity_control() {
        let n = 2000u64;
        let odd: Vec<u64> = (1..=n).filter(|x| x % 2 == 1).collect();
        let blocks = vec![odd.clone(), odd.clone(), odd];
        assert!(matches!(
            dense_sumset_check(&blocks, n, 0.2),
            Err(Error::Precondition { .. })
        ));
        let r = dense_sumset_scan(&blocks, n, 0.2).unwrap();
        assert!(!r.holds && r.first_zero.unwrap() % 2 == 0);
    }

    proptest! {
        #[test]
        fn small_convolution_matches_direct(a in prop::collection::vec(0u8..2, 64), b in prop::collection::vec(0u8..2, 64)) {
            let fa = WeightedSequence::custom(a.iter().map(|&x| x as f64).collect()).unwrap();
            let fb = WeightedSequence::custom(b.iter().map(|&x| x as f64).collect()).unwrap();
            let c = convolution(&[fa.clone(), fb.clone()]).unwrap();
            let total: f64 = c.iter().sum();
            prop_assert!((total - fa.sum() * fb.sum()).abs() <= 1e-6 * total.max(1.0));
            for m in 0..c.len() as i64 {
                let direct: f64 = (0..=m).map(|i| fa.get(i) * fb.get(m - i)).sum();
                prop_assert_eq!(c[m as usize].round(), direct);
            }
            let blocks = vec![fa.support().collect::<Vec<_>>(), fb.support().collect::<Vec<_>>()];
            let (exact, _) = indicator_convolution(&blocks, 64).unwrap();
            for m in 0..c.len() {
                prop_assert_eq!(exact[m] as f64, c[m].round());
            }
        }
    }
}
