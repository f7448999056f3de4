//! The complete sums `V_q(a, b)` and the weighted Weyl sums `G_b(alpha, N)`.
//!
//! Phases are reduced in integer arithmetic before the single conversion to
//! an angle, so equal residues give bit-identical terms.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;

use super::weights::iroot;
use crate::arith::{gcd, inv_mod, mul_mod, pow_mod};
use crate::error::{invalid, Error, Result};
use crate::residue::{factorize, WContext};

/// `e(x / m)` for an integer residue `x`.
fn e_frac(x: u64, m: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * ((x % m) as f64 / m as f64))
}

fn wq(ctx: &WContext, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(invalid("q must be >= 1"));
    }
    ctx.value().checked_mul(q).ok_or(Error::Overflow("Wq"))
}

/// `V_q(a, b) = sum_{h mod Wq, h^k = b (mod W)} e_{Wq}(a h^k)` by definition.
pub fn v_q(a: i64, b: u64, q: u64, ctx: &WContext) -> Result<Complex64> {
    let m = wq(ctx, q)?;
    let w = ctx.value();
    let b = b % w;
    let a = a.rem_euclid(m as i64) as u64;
    let k = ctx.k as u64;
    let mut total = Complex64::new(0.0, 0.0);
    for h in 0..m {
        let hk = pow_mod(h, k, m);
        if hk % w == b {
            total += e_frac(mul_mod(a, hk, m), m);
        }
    }
    Ok(total)
}

/// `V_q(a, b)` as a product of local sums over the prime powers `p^f || Wq`,
/// using `1/(Wq) = sum_p c_p / p^f (mod 1)` with `c_p = (Wq / p^f)^-1 mod p^f`.
pub fn v_q_crt(a: i64, b: u64, q: u64, ctx: &WContext) -> Result<Complex64> {
    let m = wq(ctx, q)?;
    let w = ctx.value();
    let a = a.rem_euclid(m as i64) as u64;
    let k = ctx.k as u64;
    let mut total = Complex64::new(1.0, 0.0);
    for (p, f) in factorize(m)?.factors().iter().copied() {
        let pf = p.pow(f);
        let c = inv_mod((m / pf) % pf, pf).expect("coprime cofactor");
        // the congruence condition lives mod p^(v_p(W))
        let mut cond = 1;
        while w % (cond * p) == 0 {
            cond *= p;
        }
        let ca = mul_mod(c, a, pf);
        let mut local = Complex64::new(0.0, 0.0);
        for h in 0..pf {
            let hk = pow_mod(h, k, pf);
            if hk % cond == b % cond {
                local += e_frac(mul_mod(ca, hk, pf), pf);
            }
        }
        total *= local;
    }
    Ok(total)
}

fn progression(n: u64, ctx: &WContext, b: u64) -> impl Iterator<Item = (u64, u64)> + '_ {
    let w = ctx.value();
    let k = ctx.k;
    (1..=iroot(n, k))
        .map(move |t| (t, t.pow(k)))
        .filter(move |&(_, p)| p % w == b % w)
}

/// `G_b(alpha, N) = sum_{t^k <= N, t^k = b (mod W)} k t^(k-1) e_W(alpha t^k)`.
///
/// `alpha` is split as `i + phi` with `i` an integer, and `i t^k` is reduced
/// mod `W` exactly, so `G_b(alpha + W) = G_b(alpha)` holds bit for bit.
pub fn g_b(alpha: f64, n: u64, ctx: &WContext, b: u64) -> Result<Complex64> {
    if !alpha.is_finite() {
        return Err(invalid("alpha must be finite"));
    }
    let w = ctx.value();
    let i = alpha.floor();
    let phi = alpha - i;
    let i_mod = (i.rem_euclid(w as f64)) as u64;
    let k = ctx.k;
    let mut total = Complex64::new(0.0, 0.0);
    for (t, p) in progression(n, ctx, b) {
        let int_part = mul_mod(i_mod, p % w, w) as f64 / w as f64;
        let frac = (phi * p as f64 / w as f64).fract();
        let weight = k as f64 * (t as f64).powi(k as i32 - 1);
        total += Complex64::from_polar(weight, TAU * (int_part + frac).fract());
    }
    Ok(total)
}

/// `G_b(a/q, N)` with phases `a t^k mod Wq` computed exactly.
pub fn g_b_rational(a: i64, q: u64, n: u64, ctx: &WContext, b: u64) -> Result<Complex64> {
    let m = wq(ctx, q)?;
    let a = a.rem_euclid(m as i64) as u64;
    let k = ctx.k;
    let mut total = Complex64::new(0.0, 0.0);
    for (t, p) in progression(n, ctx, b) {
        let weight = k as f64 * (t as f64).powi(k as i32 - 1);
        total += weight * e_frac(mul_mod(a, p % m, m), m);
    }
    Ok(total)
}

/// `|G_b(a/q, N) - V_q(a, b) N / (Wq)| / (Wq N^(1 - 1/k))`.
pub fn rational_residual(a: i64, q: u64, n: u64, ctx: &WContext, b: u64) -> Result<f64> {
    if gcd(a.unsigned_abs(), q) != 1 && q > 1 {
        return Err(Error::NotCoprime(a.unsigned_abs(), q));
    }
    let m = wq(ctx, q)? as f64;
    let g = g_b_rational(a, q, n, ctx, b)?;
    let v = v_q(a, b, q, ctx)?;
    let nf = n as f64;
    Ok((g - v * (nf / m)).norm() / (m * nf.powf(1.0 - 1.0 / ctx.k as f64)))
}
