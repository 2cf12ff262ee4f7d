use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::TheoremId;
use crate::model::DerivedConstants;
use crate::sim::PopulationSample;

use super::config::ArgPoint;

/// Sample mean with the standard error `σ/√n` (σ the population deviation).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: u64,
}

/// Mean and standard error of `f` over the non-truncated samples.
pub fn empirical_mean(
    samples: &[PopulationSample],
    f: impl Fn(&PopulationSample) -> f64,
) -> Result<Estimate> {
    let values: Vec<f64> = samples.iter().filter(|s| !s.truncated).map(f).collect();
    if values.is_empty() {
        return Err(Error::EmptyRun);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(Estimate {
        mean,
        stderr: (var / n).sqrt(),
        count: values.len() as u64,
    })
}

/// Estimate of `E exp(−λ₁a₁Z₁ − λ₂a₂Z₂)`.
pub fn empirical_laplace(
    samples: &[PopulationSample],
    a1: f64,
    a2: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<Estimate> {
    let (w1, w2) = (lambda1 * a1, lambda2 * a2);
    empirical_mean(samples, |s| {
        let x = w1 * s.z1 as f64 + w2 * s.z2 as f64;
        if x == 0.0 {
            1.0
        } else {
            (-x).exp()
        }
    })
}

/// Which count the pgf argument `s` acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PgfOn {
    None,
    Type1,
    Type2,
}

/// Theorem-specific normalization at one `(N, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub a1: f64,
    pub a2: f64,
    /// `r` of the limit law at this point (0 when unused).
    pub r: f64,
    pub pgf: PgfOn,
}

impl Scaling {
    /// Estimate of `E[s^{Z_k} exp(−λ₁a₁Z₁ − λ₂a₂Z₂)]`.
    pub fn estimate(&self, samples: &[PopulationSample], arg: &ArgPoint) -> Result<Estimate> {
        let base = |s: &PopulationSample| -> f64 {
            let x = arg.lambda1 * self.a1 * s.z1 as f64 + arg.lambda2 * self.a2 * s.z2 as f64;
            if x == 0.0 {
                1.0
            } else {
                (-x).exp()
            }
        };
        match self.pgf {
            PgfOn::None => empirical_mean(samples, base),
            PgfOn::Type1 => empirical_mean(samples, |s| arg.s.powf(s.z1 as f64) * base(s)),
            PgfOn::Type2 => empirical_mean(samples, |s| arg.s.powf(s.z2 as f64) * base(s)),
        }
    }

    /// Per-ancestor pgf arguments `(e^{−λ₁a₁}, e^{−λ₂a₂})` times `s` on the
    /// pgf coordinate.
    pub fn pgf_argument(&self, arg: &ArgPoint) -> [f64; 2] {
        let mut s = [
            (-arg.lambda1 * self.a1).exp(),
            (-arg.lambda2 * self.a2).exp(),
        ];
        match self.pgf {
            PgfOn::None => {}
            PgfOn::Type1 => s[0] *= arg.s,
            PgfOn::Type2 => s[1] *= arg.s,
        }
        s
    }
}

/// `ψ(t) = t^{-γ}`.
pub fn psi(gamma: f64, t: f64) -> f64 {
    t.powf(-gamma)
}

/// Normalization of theorem `theorem` at `(n, t)`.
pub fn scaling_for(
    theorem: TheoremId,
    c: &DerivedConstants<f64>,
    n: u64,
    t: f64,
    gamma: f64,
) -> Result<Scaling> {
    use TheoremId::*;
    let nf = n as f64;
    let (mu2, r_t, tail) = (c.mu2(t), c.r(t), c.tail(t));
    let k = c.k_survival();
    let plain = |a1: f64, a2: f64, r: f64| Scaling {
        a1,
        a2,
        r,
        pgf: PgfOn::None,
    };
    let scaling = match theorem {
        T1 => plain(mu2 / nf, 1.0 / nf, 0.0),
        C1 | T3 => plain(0.0, 1.0 / nf, 0.0),
        T2 => Scaling {
            a1: 0.0,
            a2: 1.0 / nf,
            r: nf / mu2,
            pgf: PgfOn::Type1,
        },
        T4 => plain(0.0, 1.0 / r_t, nf / r_t),
        T5 => plain(mu2 / (c.mu1 * r_t), 1.0 / r_t, nf / r_t),
        T6 => {
            let p = psi(gamma, t);
            plain(0.0, c.u[1] * p, nf * (k * p * tail).sqrt())
        }
        Z12 => Scaling {
            a1: 0.0,
            a2: 0.0,
            r: nf * (k * tail).sqrt(),
            pgf: PgfOn::Type2,
        },
    };
    let bad = |x: f64| !(x.is_finite() && x >= 0.0);
    if bad(scaling.a1) || bad(scaling.a2) || bad(scaling.r) {
        return Err(Error::Config(format!(
            "scaling for {theorem} at N={n}, t={t} is not finite: {scaling:?}"
        )));
    }
    Ok(scaling)
}

/// Whether `theorem` reads `λ₁`.
pub fn uses_lambda1(theorem: TheoremId) -> bool {
    matches!(theorem, TheoremId::T1 | TheoremId::T5)
}

/// Whether `theorem` has a pgf argument.
pub fn uses_s(theorem: TheoremId) -> bool {
    matches!(theorem, TheoremId::T2 | TheoremId::Z12)
}
