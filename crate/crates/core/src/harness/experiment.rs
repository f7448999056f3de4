//! Random dense sets of k-th powers, representation counts and the
//! finite-window coverage experiment.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, SubsetMode};
use super::report::{CheckResult, ExperimentReport};
use crate::circle::iroot;
use crate::convolution::exact_convolve;
use crate::error::{invalid, Result};
use crate::residue::build_k_context;
use crate::zk::{reference_value, zk_estimate};

/// The positive k-th powers `<= range_max`.
pub fn kth_powers(k: u32, range_max: u64) -> Vec<u64> {
    (1..=iroot(range_max, k)).map(|t| t.pow(k)).collect()
}

/// A seeded subset of the k-th powers up to `range_max`, sorted.
///
/// The stream is ChaCha8 seeded with `seed`; Bernoulli mode draws one `f64`
/// per power in increasing order.
pub fn random_dense_subset(
    k: u32,
    range_max: u64,
    density: f64,
    seed: u64,
    mode: SubsetMode,
) -> Result<Vec<u64>> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(invalid(format!("density = {density} outside (0, 1]")));
    }
    let powers = kth_powers(k, range_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match mode {
        SubsetMode::Full => powers,
        SubsetMode::Bernoulli => powers
            .into_iter()
            .filter(|_| rng.gen::<f64>() < density)
            .collect(),
        SubsetMode::ExactCount => {
            let count = ((density * powers.len() as f64) - 1e-9).ceil().max(0.0) as usize;
            let mut idx = sample(&mut rng, powers.len(), count.min(powers.len())).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| powers[i]).collect()
        }
    })
}

/// `|A ∩ [N]| / |N^(k) ∩ [N]|` at `N = range_max`, counting only genuine powers.
pub fn empirical_density(a: &[u64], k: u32, range_max: u64) -> f64 {
    let total = iroot(range_max, k);
    if total == 0 {
        return 0.0;
    }
    let hits = a
        .iter()
        .filter(|&&x| x >= 1 && x <= range_max && iroot(x, k).pow(k) == x)
        .count();
    hits as f64 / total as f64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationCounts {
    /// `counts[n] = r_A^s(n)` for `n in [0, n_max]`.
    pub counts: Vec<u64>,
    /// Some count exceeded `u64` and was clamped.
    pub saturated: bool,
}

/// Ordered representation counts by `s - 1` exact convolutions truncated at `n_max`.
pub fn representation_count(a: &[u64], s: u64, n_max: u64) -> Result<RepresentationCounts> {
    if s == 0 {
        return Err(invalid("s must be >= 1"));
    }
    let len = n_max as usize + 1;
    let mut ind = vec![0u64; len];
    for &x in a {
        if x <= n_max {
            ind[x as usize] = 1;
        }
    }
    let mut counts = ind.clone();
    let mut saturated = false;
    for _ in 1..s {
        let c = exact_convolve(&counts, &ind)?;
        saturated |= c.saturated;
        counts = c.values;
        counts.resize(len, 0);
    }
    Ok(RepresentationCounts { counts, saturated })
}

/// `reach[n]` iff `n in sA`, for `n in [0, n_max]`, by bitset shifts.
pub fn sumset_reach(a: &[u64], s: u64, n_max: u64) -> Vec<bool> {
    let words = (n_max as usize + 1).div_ceil(64);
    let last_mask = if (n_max + 1) % 64 == 0 {
        u64::MAX
    } else {
        (1u64 << ((n_max + 1) % 64)) - 1
    };
    let mut cur = vec![0u64; words];
    cur[0] = 1;
    let shifts: Vec<usize> = a
        .iter()
        .filter(|&&x| x <= n_max)
        .map(|&x| x as usize)
        .collect();
    for _ in 0..s {
        let mut next = vec![0u64; words];
        for &sh in &shifts {
            let (ws, bs) = (sh / 64, sh % 64);
            for i in (ws..words).rev() {
                let src = i - ws;
                let mut v = cur[src] << bs;
                if bs > 0 && src > 0 {
                    v |= cur[src - 1] >> (64 - bs);
                }
                next[i] |= v;
            }
        }
        next[words - 1] &= last_mask;
        cur = next;
    }
    (0..=n_max as usize)
        .map(|n| cur[n / 64] >> (n % 64) & 1 == 1)
        .collect()
}

/// `min_{1 <= N <= n_max} |B ∩ [N]| / N`.
pub fn shnirelman_density(b: &[u64], n_max: u64) -> f64 {
    let mut member = vec![false; n_max as usize + 1];
    for &x in b {
        if (1..=n_max).contains(&x) {
            member[x as usize] = true;
        }
    }
    let mut count = 0u64;
    let mut best = f64::INFINITY;
    for n in 1..=n_max {
        count += member[n as usize] as u64;
        best = best.min(count as f64 / n as f64);
    }
    if n_max == 0 {
        0.0
    } else {
        best
    }
}

/// `(1 - Z_k^-1 / 2)^(1/k)`, the density above which the main theorem applies.
pub fn density_threshold(k: u32) -> Result<f64> {
    let z = match reference_value(k) {
        Some(z) => z,
        None => zk_estimate(k, 1e-3)?.upper,
    };
    Ok((1.0 - 0.5 / z).powf(1.0 / k as f64))
}

/// `max(16k omega(k) + 4k + 3, k^2 + k) + 1`, the least admissible `s`.
pub fn s_threshold(k: u32) -> Result<u64> {
    let ctx = build_k_context(k)?;
    let k = k as u64;
    Ok((16 * k * ctx.omega_k as u64 + 4 * k + 3).max(k * k + k) + 1)
}

/// Samples `A` and measures which `n` in the window lie in `sA`.
pub fn coverage_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let kctx = build_k_context(config.k)?;
    let a = random_dense_subset(
        config.k,
        config.n,
        config.density,
        config.seed,
        config.subset_mode,
    )?;
    let reach = sumset_reach(&a, config.s, config.n);
    let modulus = if config.congruence_filter {
        kctx.r_k
    } else {
        1
    };
    let target = config.s % modulus;
    let mut checked = 0u64;
    let mut covered = 0u64;
    let mut first_gap = None;
    for n in config.n_min..=config.n {
        if n % modulus != target {
            continue;
        }
        checked += 1;
        if reach[n as usize] {
            covered += 1;
        } else {
            first_gap.get_or_insert(n);
        }
    }
    let coverage = if checked == 0 {
        1.0
    } else {
        covered as f64 / checked as f64
    };
    let delta_bar = density_threshold(config.k)?;
    let s_min = s_threshold(config.k)?;
    let density = empirical_density(&a, config.k, config.n);

    let mut check = CheckResult::new("coverage", coverage >= config.coverage_threshold)
        .measure("coverage", coverage)
        .measure("checked", checked as f64)
        .measure("covered", covered as f64)
        .measure("subset_size", a.len() as f64)
        .measure("empirical_density", density)
        .measure("density_threshold", delta_bar)
        .measure("s_threshold", s_min as f64)
        .measure("congruence_modulus", modulus as f64);
    if let Some(g) = first_gap {
        check = check.measure("first_gap", g as f64);
    }
    if coverage < 1.0 {
        check = check.note("flag: coverage below 1.0 on this window");
    }
    if config.s < s_min || density <= delta_bar {
        check = check.note(format!(
            "hypothesis unmet: theorem needs s >= {s_min} and density > {delta_bar:.4} (have s = {}, density = {density:.4})",
            config.s
        ));
    }
    let mut report = ExperimentReport::new(config.entries());
    report.checks.push(check);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn subsets() {
        let all = random_dense_subset(2, 100, 1.0, 1, SubsetMode::Bernoulli).unwrap();
        assert_eq!(all, kth_powers(2, 100));
        let half = random_dense_subset(2, 100, 0.5, 9, SubsetMode::ExactCount).unwrap();
        assert_eq!(half.len(), 5);
        assert_eq!(
            half,
            random_dense_subset(2, 100, 0.5, 9, SubsetMode::ExactCount).unwrap()
        );
        assert_eq!(
            random_dense_subset(2, 10_000, 0.3, 4, SubsetMode::Bernoulli).unwrap(),
            random_dense_subset(2, 10_000, 0.3, 4, SubsetMode::Bernoulli).unwrap()
        );
        assert!(random_dense_subset(2, 100, 0.0, 1, SubsetMode::Full).is_err());
    }

    #[test]
    fn densities() {
        assert_eq!(empirical_density(&kth_powers(3, 5000), 3, 5000), 1.0);
        assert_eq!(empirical_density(&[], 2, 5000), 0.0);
        let even: Vec<u64> = (1..=50).map(|t| (2 * t) * (2 * t)).collect();
        assert_eq!(empirical_density(&even, 2, 10_000), 0.5);
        let all: Vec<u64> = (1..=100).collect();
        assert_eq!(shnirelman_density(&all, 100), 1.0);
        assert_eq!(shnirelman_density(&all[1..], 100), 0.0);
        let b: Vec<u64> = std::iter::once(1).chain((1..=50).map(|x| 2 * x)).collect();
        let oracle = (1..=100u64)
            .map(|n| b.iter().filter(|&&x| x <= n).count() as f64 / n as f64)
            .fold(1.0, f64::min);
        assert_eq!(shnirelman_density(&b, 100), oracle);
    }

    #[test]
    fn counts_small() {
        let sq = [1, 4, 9, 16, 25];
        assert_eq!(representation_count(&sq, 2, 30).unwrap().counts[25], 2);
        let one = representation_count(&sq, 1, 30).unwrap().counts;
        assert!((0..=30u64).all(|n| (one[n as usize] == 1) == sq.contains(&n)));
    }

    #[test]
    fn five_squares() {
        let sq = kth_powers(2, 100_000);
        let r = representation_count(&sq, 5, 100_000).unwrap();
        assert!(!r.saturated);
        assert!((34..=100_000).all(|n| r.counts[n] > 0));
        assert_eq!(r.counts[33], 0);
        let reach = sumset_reach(&sq, 5, 100_000);
        assert!(reach.iter().zip(&r.counts).all(|(&x, &c)| x == (c > 0)));
    }

    #[test]
    fn coverage_five_squares() {
        let cfg = ExperimentConfig {
            n_min: 34,
            congruence_filter: false,
            subset_mode: SubsetMode::Full,
            ..Default::default()
        };
        let r = coverage_experiment(&cfg).unwrap();
        assert!(r.all_hold());
        assert_eq!(r.checks[0].measured["coverage"], 1.0);
        assert!(r.checks[0]
            .notes
            .iter()
            .any(|n| n.starts_with("hypothesis unmet")));
    }

    #[test]
    fn thresholds() {
        assert_eq!(s_threshold(2).unwrap(), 44);
        assert!((density_threshold(2).unwrap() - 0.9206).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn counts_match_enumeration(a in prop::collection::btree_set(1u64..40, 1..20), s in 1u64..=3) {
            let a: Vec<u64> = a.into_iter().collect();
            let n_max = 40 * s;
            let r = representation_count(&a, s, n_max).unwrap();
            let mut brute = vec![0u64; n_max as usize + 1];
            let mut idx = vec![0usize; s as usize];
            loop {
                let sum: u64 = idx.iter().map(|&i| a[i]).sum();
                brute[sum as usize] += 1;
                let mut j = 0;
                while j < idx.len() {
                    idx[j] += 1;
                    if idx[j] < a.len() { break; }
                    idx[j] = 0;
                    j += 1;
                }
                if j == idx.len() { break; }
            }
            prop_assert_eq!(r.counts, brute);
        }

        #[test]
        fn exact_count_density(d in 0.01f64..=1.0, seed: u64) {
            let a = random_dense_subset(2, 10_000, d, seed, SubsetMode::ExactCount).unwrap();
            prop_assert!((empirical_density(&a, 2, 10_000) - d).abs() <= 1.0 / 100.0 + 1e-12);
        }
    }
}
