use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DerivedConstants;

use super::hfun::HSolution;
use super::ofun::OValue;
use super::theta::ThetaSolution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    T1,
    C1,
    T2,
    T3,
    T4,
    T5,
    T6,
    Z12,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::T1,
        TheoremId::C1,
        TheoremId::T2,
        TheoremId::T3,
        TheoremId::T4,
        TheoremId::T5,
        TheoremId::T6,
        TheoremId::Z12,
    ];
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown theorem {s:?}")))
    }
}

/// Arguments of a limit transform. Single-`λ` laws read `lambda2`; pgf laws
/// read `s`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LimitArgs {
    pub lambda1: f64,
    pub lambda2: f64,
    pub r: f64,
    pub s: f64,
}

/// Solved objects some predictions need.
#[derive(Clone, Debug, Default)]
pub struct SolvedLimits {
    pub theta: Option<ThetaSolution<f64>>,
    pub h: Option<HSolution<f64>>,
    pub o: Vec<OValue>,
}

impl SolvedLimits {
    fn o_at(&self, s: f64) -> Option<&OValue> {
        self.o.iter().find(|o| (o.s - s).abs() <= 1e-12)
    }
}

/// Value of the limiting Laplace transform (or pgf) of `theorem` at `args`.
pub fn predict_limit(
    theorem: TheoremId,
    c: &DerivedConstants<f64>,
    args: &LimitArgs,
    solved: &SolvedLimits,
) -> Result<f64> {
    let d = &c.d.0;
    let bg = c.beta * c.gamma_beta;
    let LimitArgs {
        lambda1,
        lambda2,
        r,
        s,
    } = *args;
    let exponent = match theorem {
        TheoremId::T1 => -c.mu1 * bg * d[1][0] * lambda1 - d[1][1] * lambda2,
        TheoremId::C1 | TheoremId::T3 => -d[1][1] * lambda2,
        TheoremId::T2 => {
            // Q(w; 1, 1) = 0, so O(1) = 0.
            let o2 = if s == 1.0 {
                0.0
            } else {
                solved.o_at(s).ok_or(Error::MissingSolution("T2"))?.value[1]
            };
            -r * bg * c.mu1 * d[1][0] * (1.0 - s) + r * o2 - d[1][1] * lambda2
        }
        TheoremId::T4 => {
            let theta = solved.theta.as_ref().ok_or(Error::MissingSolution("T4"))?;
            -r * theta.omega(lambda2)?[1]
        }
        TheoremId::T5 => {
            let h = solved.h.as_ref().ok_or(Error::MissingSolution("T5"))?;
            if lambda1 == 0.0 {
                -r * d[1][1] * lambda2
            } else {
                let p = 2.0 * c.beta - 1.0;
                let theta = lambda1.powf(1.0 / p);
                let lam = lambda2 * lambda1.powf(-c.beta / p);
                -r * lambda1 * h.eval(theta, lam)?[1]
            }
        }
        TheoremId::T6 => -r * c.u[1] * lambda2.sqrt(),
        TheoremId::Z12 => -r * c.u[1] * (1.0 - s).sqrt(),
    };
    Ok(exponent.exp())
}
