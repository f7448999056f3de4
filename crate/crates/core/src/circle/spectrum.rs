//! Fourier transforms on a uniform grid of `T = R/Z`.
//!
//! `f^(alpha) = sum_{n in [N]} f(n) e(-n alpha)`, sampled at `alpha = j/M`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::weights::{build_nu_b, WeightedSequence};
use crate::arith::gcd;
use crate::convolution::MAX_CONVOLUTION_LEN;
use crate::error::{invalid, Error, Result};
use crate::residue::WContext;

#[derive(Clone, Debug)]
pub struct SpectrumGrid {
    pub m: usize,
    /// `values[j] = f^(j / M)`.
    pub values: Vec<Complex64>,
}

impl SpectrumGrid {
    pub fn frequency(&self, j: usize) -> f64 {
        j as f64 / self.m as f64
    }

    pub fn magnitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|c| c.norm())
    }
}

fn check_grid(n: usize, m: usize) -> Result<()> {
    if !m.is_power_of_two() {
        return Err(invalid(format!("grid size M = {m} must be a power of two")));
    }
    if (m as u128) < 4 * n as u128 {
        return Err(invalid(format!(
            "grid size M = {m} must be at least 4N = {}",
            4 * n as u128
        )));
    }
    if m > MAX_CONVOLUTION_LEN {
        return Err(Error::OutOfRange {
            what: "grid size M",
            value: m as u64,
            limit: MAX_CONVOLUTION_LEN as u64,
        });
    }
    Ok(())
}

/// Transform of a possibly signed sequence `values[n - 1] = f(n)` on the M-grid.
pub fn dft_signed(values: &[f64], m: usize) -> Result<Vec<Complex64>> {
    check_grid(values.len(), m)?;
    Ok(transform(values, m))
}

fn transform(values: &[f64], m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (i, &v) in values.iter().enumerate() {
        buf[i + 1].re = v;
    }
    FftPlanner::<f64>::new()
        .plan_fft_forward(m)
        .process(&mut buf);
    buf
}

/// `f^` at `j/M` for `j in [0, M)`; requires `M >= 4N` a power of two.
pub fn dft_grid(f: &WeightedSequence, m: usize) -> Result<SpectrumGrid> {
    check_grid(f.n(), m)?;
    Ok(SpectrumGrid {
        m,
        values: transform(f.values(), m),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudoReport {
    /// `max_j |nu^(j/M) - 1_[N]^(j/M)| / N`.
    pub eta: f64,
    pub argmax_index: usize,
    pub argmax_frequency: f64,
    pub n: usize,
    pub m: usize,
}

/// Fourier pseudorandomness of an arbitrary majorant against `1_[N]`.
pub fn pseudorandomness_of(nu: &WeightedSequence, m: usize) -> Result<PseudoReport> {
    let n = nu.n();
    if n == 0 {
        return Err(invalid("N must be >= 1"));
    }
    let a = dft_grid(nu, m)?;
    let b = transform(&vec![1.0; n], m);
    let (argmax, diff) = a
        .values
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );
    Ok(PseudoReport {
        eta: diff / n as f64,
        argmax_index: argmax,
        argmax_frequency: argmax as f64 / m as f64,
        n,
        m,
    })
}

/// The same for `nu_b`; requires `gcd(b, W) = 1`.
pub fn pseudorandomness_eta(ctx: &WContext, b: u64, n: usize, m: usize) -> Result<PseudoReport> {
    let w = ctx.value();
    if gcd(b, w) != 1 {
        return Err(Error::NotCoprime(b, w));
    }
    let nu = build_nu_b(n, ctx, b)?;
    pseudorandomness_of(&nu, m)
}

/// `K^ = (M^-1 sum_j |f^(j/M)|^q)^(1/q) / N^(1 - 1/q)`, the discretised
/// restriction constant.
pub fn restriction_constant(f: &WeightedSequence, q_exp: f64, m: usize) -> Result<f64> {
    if !(q_exp.is_finite() && q_exp > 1.0) {
        return Err(invalid(format!(
            "restriction exponent {q_exp} must exceed 1"
        )));
    }
    let n = f.n();
    if n == 0 {
        return Err(invalid("N must be >= 1"));
    }
    let grid = dft_grid(f, m)?;
    let top = grid.magnitudes().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    // factor out the peak so the q-th powers stay in range
    let s: f64 = grid.magnitudes().map(|x| (x / top).powf(q_exp)).sum();
    let norm = top * (s / m as f64).powf(1.0 / q_exp);
    Ok(norm / (n as f64).powf(1.0 - 1.0 / q_exp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_matches_definition() {
        let f = WeightedSequence::custom(vec![1.0, 0.5, 0.0, 2.0, 3.0]).unwrap();
        let g = dft_grid(&f, 32).unwrap();
        for j in 0..32 {
            let direct: Complex64 = (1..=5)
                .map(|n| Complex64::from_polar(f.get(n), -2.0 * PI * n as f64 * j as f64 / 32.0))
                .sum();
            assert!((direct - g.values[j]).norm() < 1e-12);
        }
        assert!(dft_grid(&f, 16).is_err());
        assert!(dft_grid(&f, 24).is_err());
    }

    #[test]
    fn parseval() {
        let ctx = WContext::new(2, 2).unwrap();
        let nu = build_nu_b(1 << 12, &ctx, 1).unwrap();
        let m = 1 << 14;
        let g = dft_grid(&nu, m).unwrap();
        let lhs: f64 = g.magnitudes().map(|x| x * x).sum::<f64>() / m as f64;
        let rhs: f64 = nu.values().iter().map(|x| x * x).sum();
        assert!((lhs - rhs).abs() <= 1e-9 * rhs);
    }

    #[test]
    fn interval_is_perfectly_pseudorandom() {
        let r = pseudorandomness_of(&WeightedSequence::interval(1000), 4096).unwrap();
        assert_eq!(r.eta, 0.0);
        let ctx = WContext::new(2, 2).unwrap();
        assert!(matches!(
            pseudorandomness_eta(&ctx, 2, 100, 512),
            Err(Error::NotCoprime(2, 4))
        ));
        let r = pseudorandomness_eta(&ctx, 1, 1 << 14, 1 << 16).unwrap();
        assert!(r.eta > 0.0 && r.eta < 1.0);
    }

    #[test]
    fn restriction_of_interval() {
        // |1^_[N]|^q integrates to about C_q N^(q-1), so K^ is bounded in N
        let a = restriction_constant(&WeightedSequence::interval(1 << 10), 3.0, 1 << 12).unwrap();
        let b = restriction_constant(&WeightedSequence::interval(1 << 14), 3.0, 1 << 16).unwrap();
        assert!((a - b).abs() < 0.05 * a);
        assert!(restriction_constant(&WeightedSequence::interval(10), 1.0, 64).is_err());
        // q = 2 is Parseval: K^ = sqrt(sum f^2 / N)
        let c = restriction_constant(&WeightedSequence::interval(100), 2.0, 512).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }
}
