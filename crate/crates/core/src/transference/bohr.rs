//! Large spectra, Bohr sets and the dense model `f* = E_{a,b in B} f(n + a - b)`.

use std::f64::consts::TAU;

use log::warn;
use serde::Serialize;

use crate::circle::{dft_grid, dft_signed, SequenceKind, SequenceMeta, WeightedSequence};
use crate::convolution::{exact_convolve, fft_convolve};
use crate::error::{invalid, Error, Result};

/// Doublings of `delta` tried when the Bohr set comes out empty.
pub const BOHR_RETRIES: u32 = 3;

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("delta = {delta} must lie in (0, 1)")))
    }
}

/// Grid indices `j` with `|f^(j/M)| >= delta N`.
pub fn large_spectrum(f: &WeightedSequence, delta: f64, m: usize) -> Result<Vec<u64>> {
    check_delta(delta)?;
    let grid = dft_grid(f, m)?;
    let bar = delta * f.n() as f64;
    Ok(grid
        .magnitudes()
        .enumerate()
        .filter(|&(_, x)| x >= bar && x > 0.0)
        .map(|(j, _)| j as u64)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BohrSet {
    pub delta: f64,
    pub m: u64,
    /// Grid indices `j`, standing for the frequencies `j/M`.
    pub frequencies: Vec<u64>,
    pub elements: Vec<u64>,
}

/// `||b j / M||` for an integer `b`, from the exact residue `b j mod M`.
pub fn torus_distance(b: u64, j: u64, m: u64) -> f64 {
    let r = (b as u128 * j as u128 % m as u128) as u64;
    r.min(m - r) as f64 / m as f64
}

/// `{1 <= b <= delta N : ||b gamma|| < delta / 2 pi for every stored gamma}`.
pub fn bohr_set(frequencies: &[u64], m: u64, delta: f64, n: usize) -> Result<BohrSet> {
    check_delta(delta)?;
    if m == 0 {
        return Err(invalid("grid size must be positive"));
    }
    let top = (delta * n as f64).floor() as u64;
    if top == 0 {
        return Err(invalid(format!("delta N = {} < 1", delta * n as f64)));
    }
    let radius = delta / TAU;
    let elements: Vec<u64> = (1..=top)
        .filter(|&b| {
            frequencies
                .iter()
                .all(|&j| torus_distance(b, j, m) < radius)
        })
        .collect();
    if elements.is_empty() {
        return Err(Error::EmptyBohrSet {
            delta,
            frequencies: frequencies.len(),
        });
    }
    Ok(BohrSet {
        delta,
        m,
        frequencies: frequencies.to_vec(),
        elements,
    })
}

#[derive(Clone, Debug)]
pub struct DenseModel {
    pub f_star: WeightedSequence,
    /// `f - f*`, possibly negative.
    pub f_unf: Vec<f64>,
    pub bohr: BohrSet,
    /// The delta the Bohr set was built with, after any retries.
    pub delta_used: f64,
}

/// `f*` for a fixed Bohr set: `f*(n) = |B|^-2 sum_d c(d) f(n + d)` with
/// `c(d) = #{(a, b) in B^2 : a - b = d}`, which is even in `d`.
fn average(f: &WeightedSequence, bohr: &BohrSet) -> Result<Vec<f64>> {
    let lo = bohr.elements[0];
    let span = (bohr.elements[bohr.elements.len() - 1] - lo) as usize;
    let mut ind = vec![0u64; span + 1];
    for &b in &bohr.elements {
        ind[(b - lo) as usize] = 1;
    }
    let rev: Vec<u64> = ind.iter().rev().copied().collect();
    // c[i] = c(i - span)
    let c = exact_convolve(&ind, &rev)?;
    let size = bohr.elements.len() as f64;
    let c: Vec<f64> = c.values.iter().map(|&x| x as f64 / (size * size)).collect();
    // (f * c)(n) = sum_i f(n - i + span) c[i]; f.padded()[m] = f(m)
    let conv = fft_convolve(&f.padded(), &c)?;
    Ok((1..=f.n()).map(|n| conv[n + span].max(0.0)).collect())
}

/// Dense model against an explicit frequency set.
pub fn dense_model_with_frequencies(
    f: &WeightedSequence,
    frequencies: &[u64],
    delta: f64,
    m: usize,
) -> Result<DenseModel> {
    let bohr = bohr_set(frequencies, m as u64, delta, f.n())?;
    let star = average(f, &bohr)?;
    let f_unf = f.values().iter().zip(&star).map(|(x, y)| x - y).collect();
    let meta = SequenceMeta {
        kind: SequenceKind::DenseModel,
        ..f.meta.clone()
    };
    Ok(DenseModel {
        f_star: WeightedSequence::new(star, meta)?,
        f_unf,
        bohr,
        delta_used: delta,
    })
}

/// Dense model over the large spectrum of `f`; an empty Bohr set doubles
/// `delta` up to [`BOHR_RETRIES`] times.
pub fn dense_model(f: &WeightedSequence, delta: f64, m: usize) -> Result<DenseModel> {
    let mut d = delta;
    let mut attempt = 0;
    loop {
        let spectrum = large_spectrum(f, d, m)?;
        match dense_model_with_frequencies(f, &spectrum, d, m) {
            Err(Error::EmptyBohrSet { .. }) if attempt < BOHR_RETRIES && 2.0 * d < 1.0 => {
                attempt += 1;
                warn!(
                    "empty Bohr set at delta = {d} ({} frequencies); retrying with {}",
                    spectrum.len(),
                    2.0 * d
                );
                d *= 2.0;
            }
            other => return other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UniformityCheck {
    /// `max_j |f_unf^(j/M)| / N`.
    pub ratio: f64,
    pub holds: bool,
}

pub fn check_uniformity(model: &DenseModel, delta: f64, m: usize) -> Result<UniformityCheck> {
    let n = model.f_unf.len();
    if n == 0 {
        return Ok(UniformityCheck {
            ratio: 0.0,
            holds: true,
        });
    }
    let top = dft_signed(&model.f_unf, m)?
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let ratio = top / n as f64;
    Ok(UniformityCheck {
        ratio,
        holds: ratio <= delta * (1.0 + 1e-6),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{build_f_b, PowerSet};
    use crate::residue::WContext;

    #[test]
    fn bohr_examples() {
        let all: Vec<u64> = (1..=100).collect();
        assert_eq!(bohr_set(&[], 4000, 0.1, 1000).unwrap().elements, all);
        assert_eq!(bohr_set(&[0], 4000, 0.1, 1000).unwrap().elements, all);
        let evens: Vec<u64> = (1..=50).map(|x| 2 * x).collect();
        assert_eq!(bohr_set(&[2000], 4000, 0.1, 1000).unwrap().elements, evens);
        assert!(matches!(
            bohr_set(&[1, 3, 7, 11, 13], 32, 0.01, 1000),
            Err(Error::EmptyBohrSet { .. })
        ));
        assert!(bohr_set(&[], 8, 0.1, 5).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let m = 1 << 12;
        assert!(large_spectrum(&WeightedSequence::interval(1000), 0.5, m)
            .unwrap()
            .contains(&0));
        assert!(large_spectrum(&WeightedSequence::zeros(1000), 0.5, m)
            .unwrap()
            .is_empty());
        let ctx = WContext::new(2, 2).unwrap();
        let f = build_f_b(&PowerSet::All, 1 << 14, &ctx, 1).unwrap();
        let s = large_spectrum(&f, 0.3, 1 << 16).unwrap();
        assert!(s.contains(&0) && s.len() <= 200);
    }

    #[test]
    fn singleton_bohr_set_is_identity() {
        let f = WeightedSequence::custom((0..64).map(|i| ((i * 7) % 5) as f64).collect()).unwrap();
        let bohr = BohrSet {
            delta: 0.5,
            m: 256,
            frequencies: vec![],
            elements: vec![7],
        };
        let star = average(&f, &bohr).unwrap();
        for (x, y) in star.iter().zip(f.values()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn interval_interior_unaffected() {
        let n = 1000;
        let f = WeightedSequence::interval(n);
        let model = dense_model_with_frequencies(&f, &[], 0.1, 4096).unwrap();
        for i in 101..=900 {
            assert!((model.f_star.get(i) - 1.0).abs() < 1e-9);
        }
        for (i, (s, u)) in model.f_star.values().iter().zip(&model.f_unf).enumerate() {
            assert!((s + u - f.values()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn model_of_f_b() {
        let ctx = WContext::new(2, 2).unwrap();
        let n = 1 << 14;
        let m = 1 << 16;
        let f = build_f_b(&PowerSet::All, n, &ctx, 1).unwrap();
        let model = dense_model(&f, 0.3, m).unwrap();
        // 4n + 1 = t^2 forces n = m(m + 1): f lives on even n, 1/2 is in the
        // spectrum, B is all even and f* is about 2 on evens, 0 on odds
        assert!(model.bohr.frequencies.contains(&(m as u64 / 2)));
        assert!(model.bohr.elements.iter().all(|b| b % 2 == 0));
        assert!(model.f_star.values().iter().step_by(2).all(|&x| x < 1e-9));
        assert!(model
            .f_star
            .values()
            .iter()
            .all(|&x| (0.0..=2.4).contains(&x)));
        let pair_max = model
            .f_star
            .values()
            .chunks(2)
            .map(|c| c.iter().sum::<f64>() / 2.0)
            .fold(0.0, f64::max);
        assert!(pair_max <= 1.2);
        let g = dft_grid(&f, m).unwrap();
        let gs = dft_grid(&model.f_star, m).unwrap();
        for &j in &model.bohr.frequencies {
            assert!(gs.values[j as usize].norm() <= g.values[j as usize].norm() + 1e-9 * n as f64);
        }
        // 142 frequencies at delta = 0.3 leave no room for B; one doubling is needed
        assert_eq!(model.delta_used, 0.6);
        assert!(check_uniformity(&model, model.delta_used, m).unwrap().holds);
    }

    #[test]
    fn uniformity_negative_control() {
        let n = 4096;
        let ap = WeightedSequence::indicator(n, (1..=n as u64 / 2).map(|x| 2 * x)).unwrap();
        let m = 4 * n;
        // the spectrum at 1/2 is left out, so the model cannot see the bias
        let model = dense_model_with_frequencies(&ap, &[0], 0.1, m).unwrap();
        let check = check_uniformity(&model, 0.1, m).unwrap();
        assert!(!check.holds && check.ratio > 0.4);
        let zero = dense_model_with_frequencies(&WeightedSequence::zeros(n), &[], 0.1, m).unwrap();
        assert_eq!(check_uniformity(&zero, 0.1, m).unwrap().ratio, 0.0);
    }
}
