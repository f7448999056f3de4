//! Major arcs `M(q, a) = {alpha : |alpha - a/q| <= 1/T}` for `q <= Q`, with
//! `Q = floor(N^rho)` and `T = floor(N^(1-rho))`; the minor arcs are the rest.

use serde::Serialize;

use crate::arith::{euler_phi, gcd};
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MajorArc {
    pub q: u64,
    pub a: u64,
}

impl MajorArc {
    pub fn center(&self) -> f64 {
        self.a as f64 / self.q as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ArcClass {
    Major { q: u64, a: u64 },
    Minor,
}

impl std::fmt::Display for ArcClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArcClass::Major { q, a } => write!(f, "major(q={q},a={a})"),
            ArcClass::Minor => f.write_str("minor"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcDecomposition {
    pub n: u64,
    pub rho: f64,
    pub big_q: u64,
    pub t: u64,
    pub arcs: Vec<MajorArc>,
}

pub fn decompose_arcs(n: u64, rho: f64) -> Result<ArcDecomposition> {
    if !(rho > 0.0 && rho <= 1.0 / 3.0) {
        return Err(invalid(format!("rho = {rho} must lie in (0, 1/3]")));
    }
    if n < 2 {
        return Err(invalid("N must be >= 2"));
    }
    let nf = n as f64;
    let big_q = (nf.powf(rho) + 1e-9).floor().max(1.0) as u64;
    let t = (nf.powf(1.0 - rho) + 1e-9).floor() as u64;
    if (t as u128) <= 2 * (big_q as u128).pow(2) {
        return Err(Error::ArcsOverlap {
            t,
            bound: 2 * big_q * big_q,
        });
    }
    let arcs = (1..=big_q)
        .flat_map(|q| {
            (0..q)
                .filter(move |&a| gcd(a, q) == 1)
                .map(move |a| MajorArc { q, a })
        })
        .collect();
    Ok(ArcDecomposition {
        n,
        rho,
        big_q,
        t,
        arcs,
    })
}

impl ArcDecomposition {
    /// `sum_{q <= Q} phi(q) 2/T`.
    pub fn major_measure(&self) -> f64 {
        (1..=self.big_q).map(euler_phi).sum::<u64>() as f64 * 2.0 / self.t as f64
    }

    /// Classifies `alpha` taken mod 1.
    pub fn classify(&self, alpha: f64) -> ArcClass {
        let x = alpha.rem_euclid(1.0);
        let radius = 1.0 / self.t as f64;
        for q in 1..=self.big_q {
            let a = (x * q as f64).round();
            if (x - a / q as f64).abs() <= radius {
                let a = a as u64 % q;
                if gcd(a, q) == 1 {
                    return ArcClass::Major { q, a };
                }
            }
        }
        ArcClass::Minor
    }

    /// Classifies the grid point `j/M` in exact integer arithmetic:
    /// `|j/M - a/q| <= 1/T` iff `T |jq - aM| <= Mq`.
    pub fn classify_grid(&self, j: u64, m: u64) -> ArcClass {
        let j = (j % m) as i128;
        let mi = m as i128;
        for q in 1..=self.big_q as i128 {
            // nearest a to jq/M, with a = q standing for 0
            let a = (2 * j * q + mi).div_euclid(2 * mi);
            if (self.t as i128) * (j * q - a * mi).abs() <= mi * q {
                let a = (a % q) as u64;
                if gcd(a, q as u64) == 1 {
                    return ArcClass::Major { q: q as u64, a };
                }
            }
        }
        ArcClass::Minor
    }
}
