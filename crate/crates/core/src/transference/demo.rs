//! The transference pipeline end to end: measured pseudorandomness and
//! restriction constants, dense models, the Hölder error term, and
//! positivity of `f_1 * ... * f_s` on `((1 - kappa^2) sN/2, (1 + kappa) sN/2)`
//! with `kappa = eps/32`.

use serde::Serialize;

use super::bohr::dense_model;
use super::sumset::{convolution, open_window};
use crate::circle::{
    build_nu_b, pseudorandomness_of, restriction_constant, SequenceKind, WeightedSequence,
};
use crate::error::{invalid, Error, Result};
use crate::residue::WContext;

pub const DEFAULT_ETA_GATE: f64 = 0.1;
pub const DEFAULT_K_GATE: f64 = 4.0;

#[derive(Clone, Debug)]
pub struct TransferenceParams {
    pub eps: f64,
    pub delta: f64,
    pub m: usize,
    /// Restriction exponent; `s - 1/2` when absent.
    pub q_exp: Option<f64>,
    pub eta_gate: f64,
    pub k_gate: f64,
}

impl TransferenceParams {
    pub fn new(eps: f64, delta: f64, m: usize) -> Self {
        Self {
            eps,
            delta,
            m,
            q_exp: None,
            eta_gate: DEFAULT_ETA_GATE,
            k_gate: DEFAULT_K_GATE,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferenceReport {
    pub s: usize,
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub delta_used: f64,
    pub kappa: f64,
    pub q_exp: f64,
    pub means: Vec<f64>,
    pub eta: f64,
    pub eta_gate: f64,
    pub eta_ok: bool,
    pub k_hat: f64,
    pub k_gate: f64,
    pub k_ok: bool,
    pub bohr_size: usize,
    pub spectrum_size: usize,
    pub window: (u64, u64),
    pub min_convolution: f64,
    pub first_zero: Option<u64>,
    pub zero_count: u64,
    /// `2^s delta^(s - q) K^q N^(s - 1)`.
    pub holder_bound: f64,
    pub holder_max_deviation: f64,
    pub holder_ok: bool,
    pub positive: bool,
    pub holds: bool,
}

/// The majorant a sequence is measured against: `nu_b` for W-tricked weights,
/// `1_[N]` for anything bounded by 1.
fn majorant(f: &WeightedSequence) -> Result<WeightedSequence> {
    match (f.meta.kind, f.meta.k, f.meta.w, f.meta.b) {
        (SequenceKind::FB | SequenceKind::NuB, Some(k), Some(w), Some(b)) => {
            build_nu_b(f.n(), &WContext::new(k, w)?, b)
        }
        _ if f.values().iter().all(|&x| x <= 1.0) => Ok(WeightedSequence::interval(f.n())),
        _ => Err(invalid(
            "sequence exceeds 1 and carries no W-trick metadata for its majorant",
        )),
    }
}

fn precondition(name: impl Into<String>, measured: f64, required: f64) -> Error {
    Error::Precondition {
        name: name.into(),
        measured,
        required,
    }
}

pub fn transference_demo(
    fs: &[WeightedSequence],
    params: &TransferenceParams,
) -> Result<TransferenceReport> {
    let s = fs.len();
    if s < 2 {
        return Err(invalid("the demo needs s >= 2 sequences"));
    }
    let n = fs[0].n();
    if n == 0 || fs.iter().any(|f| f.n() != n) {
        return Err(invalid("all sequences must share the same N >= 1"));
    }
    let eps = params.eps;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps = {eps} must lie in (0, 1)")));
    }
    let means: Vec<f64> = fs.iter().map(|f| f.mean()).collect();
    let total: f64 = means.iter().sum();
    let need = s as f64 * (1.0 + eps) / 2.0;
    if total <= need {
        return Err(precondition(
            "E f_1 + ... + E f_s > s(1 + eps)/2",
            total,
            need,
        ));
    }
    if let Some((i, &m)) = means.iter().enumerate().find(|(_, &m)| m <= eps / 2.0) {
        return Err(precondition(format!("E f_{} > eps/2", i + 1), m, eps / 2.0));
    }
    let q_exp = params.q_exp.unwrap_or(s as f64 - 0.5);

    let mut eta: f64 = 0.0;
    let mut k_hat: f64 = 0.0;
    for f in fs {
        eta = eta.max(pseudorandomness_of(&majorant(f)?, params.m)?.eta);
        k_hat = k_hat.max(restriction_constant(f, q_exp, params.m)?);
    }

    let models = fs
        .iter()
        .map(|f| dense_model(f, params.delta, params.m))
        .collect::<Result<Vec<_>>>()?;
    let delta_used = models
        .iter()
        .map(|m| m.delta_used)
        .fold(params.delta, f64::max);
    let stars: Vec<WeightedSequence> = models.iter().map(|m| m.f_star.clone()).collect();

    let conv = convolution(fs)?;
    let conv_star = convolution(&stars)?;
    let kappa = eps / 32.0;
    let mid = s as f64 * n as f64 / 2.0;
    let window = open_window((1.0 - kappa * kappa) * mid, (1.0 + kappa) * mid);
    // floating noise floor of the transform, relative to the total mass
    let mass: f64 = fs.iter().map(|f| f.sum()).product();
    let floor = 1e-10 * mass;

    let mut min_convolution = f64::INFINITY;
    let mut first_zero = None;
    let mut zero_count = 0;
    let mut deviation: f64 = 0.0;
    for m in window.0..=window.1 {
        let c = conv[m as usize];
        min_convolution = min_convolution.min(c);
        if c <= floor {
            zero_count += 1;
            first_zero.get_or_insert(m);
        }
        deviation = deviation.max((c - conv_star[m as usize]).abs());
    }
    let holder_bound = 2f64.powi(s as i32)
        * delta_used.powf(s as f64 - q_exp)
        * k_hat.powf(q_exp)
        * (n as f64).powi(s as i32 - 1);
    let eta_ok = eta <= params.eta_gate;
    let k_ok = k_hat <= params.k_gate;
    let positive = zero_count == 0 && window.0 <= window.1;
    Ok(TransferenceReport {
        s,
        n,
        eps,
        delta: params.delta,
        delta_used,
        kappa,
        q_exp,
        means,
        eta,
        eta_gate: params.eta_gate,
        eta_ok,
        k_hat,
        k_gate: params.k_gate,
        k_ok,
        bohr_size: models
            .iter()
            .map(|m| m.bohr.elements.len())
            .min()
            .unwrap_or(0),
        spectrum_size: models
            .iter()
            .map(|m| m.bohr.frequencies.len())
            .max()
            .unwrap_or(0),
        window,
        min_convolution: min_convolution.max(0.0),
        first_zero,
        zero_count,
        holder_bound,
        holder_max_deviation: deviation,
        holder_ok: deviation <= holder_bound,
        positive,
        holds: positive && eta_ok && k_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals_are_positive() {
        let n = 1 << 10;
        let fs = vec![WeightedSequence::interval(n); 3];
        let r = transference_demo(&fs, &TransferenceParams::new(0.5, 0.3, 4 * n)).unwrap();
        assert!(r.positive && r.holds, "{r:?}");
        assert_eq!(r.eta, 0.0);
        assert!(r.holder_ok);
    }

    #[test]
    fn mean_gate() {
        let n = 512;
        let thin = WeightedSequence::indicator(n, [1, 2, 3]).unwrap();
        let fs = vec![
            WeightedSequence::interval(n),
            WeightedSequence::interval(n),
            thin,
        ];
        let err = transference_demo(&fs, &TransferenceParams::new(0.2, 0.3, 4 * n)).unwrap_err();
        assert!(matches!(err, Error::Precondition { .. }));
    }
}
