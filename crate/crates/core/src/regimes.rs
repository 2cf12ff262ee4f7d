//! Evolutionary stages of `(N, t)` and the theorem that governs each.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::limits::TheoremId;
use crate::model::{DerivedConstants, SlowlyVarying};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    Early,
    Intermediate,
    Final,
    Extinction,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Theorem label of a regime; `OpenCase` marks the unresolved `β = ½` case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeTheorem {
    Known(TheoremId),
    OpenCase,
}

impl fmt::Display for RegimeTheorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeTheorem::Known(t) => write!(f, "{t}"),
            RegimeTheorem::OpenCase => f.write_str("OpenCase"),
        }
    }
}

/// Ratios below `lo` count as tending to zero, above `hi` as tending to infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioThresholds {
    pub lo: f64,
    pub hi: f64,
}

impl Default for RatioThresholds {
    fn default() -> Self {
        Self { lo: 0.1, hi: 10.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeDiagnostics {
    pub r_over_n: f64,
    pub mu2_over_n: f64,
    pub n_tail: f64,
    /// `N √((v₂u₂/B)(1 − G₂(t)))`
    pub final_scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeLabel {
    pub stage: Stage,
    pub theorem: RegimeTheorem,
    pub diagnostics: RegimeDiagnostics,
    /// Type-1 particles are not proven absent here (large `β`, final stage).
    pub type1_absence_unresolved: bool,
}

pub fn diagnostics(c: &DerivedConstants<f64>, n: f64, t: f64) -> RegimeDiagnostics {
    let tail = c.tail(t);
    RegimeDiagnostics {
        r_over_n: c.r(t) / n,
        mu2_over_n: c.mu2(t) / n,
        n_tail: n * tail,
        final_scale: n * (c.k_survival() * tail).sqrt(),
    }
}

/// Maps `(N, t)` to a stage and the theorem describing it.
pub fn classify_regime(
    c: &DerivedConstants<f64>,
    n: f64,
    t: f64,
    th: RatioThresholds,
) -> RegimeLabel {
    use TheoremId::*;
    let diag = diagnostics(c, n, t);
    let beta = c.beta;
    let (x, y, z) = (diag.r_over_n, diag.mu2_over_n, diag.final_scale);
    let known = RegimeTheorem::Known;
    let (stage, theorem) = if z < th.lo {
        (Stage::Extinction, known(Z12))
    } else if x > th.hi {
        (Stage::Final, known(if z > th.hi { T6 } else { Z12 }))
    } else if x >= th.lo {
        let theorem = if beta < 0.5 {
            known(T4)
        } else if beta > 0.5 {
            known(T5)
        } else if y > th.hi {
            known(T4)
        } else if y < th.lo {
            known(T5)
        } else {
            RegimeTheorem::OpenCase
        };
        (Stage::Intermediate, theorem)
    } else {
        let theorem = if y < th.lo {
            T1
        } else if beta > 0.5 {
            C1
        } else if y > th.hi {
            T3
        } else {
            T2
        };
        (Stage::Early, known(theorem))
    };
    RegimeLabel {
        stage,
        theorem,
        diagnostics: diag,
        type1_absence_unresolved: stage == Stage::Final && beta > 2.0 / 3.0 && y <= th.hi,
    }
}

/// `N₁(y)`, `N₂(y)`, `N₃(y)`: the functions whose inverses are `g₁`, `g₂`, `g₃`.
pub fn n_functions(c: &DerivedConstants<f64>, y: f64) -> [f64; 3] {
    let beta = c.beta;
    let n3 = (c.b / (c.v[1] * c.u[1] * c.tail(y))).sqrt();
    if beta == 1.0 {
        let l1 = c.mu2(y);
        [y / l1, l1, n3]
    } else {
        let ell = c.tail2.ell.eval(y);
        [
            (1.0 - beta) * y.powf(beta) / ell,
            y.powf(1.0 - beta) * ell / (1.0 - beta),
            n3,
        ]
    }
}

/// `(g₁(N), g₂(N), g₃(N))`.
pub fn g_thresholds(c: &DerivedConstants<f64>, n: f64) -> [f64; 3] {
    let beta = c.beta;
    let k = c.v[1] * c.u[1] / c.b;
    if let (SlowlyVarying::Constant { c: ell }, true) = (c.tail2.ell, beta < 1.0) {
        let g3 = (n * n * k * ell).powf(1.0 / beta).max(c.tail2.scale);
        return [
            (ell * n / (1.0 - beta)).powf(1.0 / beta),
            (n * (1.0 - beta) / ell).powf(1.0 / (1.0 - beta)),
            g3,
        ];
    }
    let lo = c.tail2.scale;
    [0, 1, 2].map(|i| invert_increasing(|y| n_functions(c, y)[i], n, lo))
}

/// Smallest `y ≥ lo` with `f(y) ≥ target`, by bisection on `ln y`.
fn invert_increasing(f: impl Fn(f64) -> f64, target: f64, lo: f64) -> f64 {
    if f(lo) >= target {
        return lo;
    }
    let (mut a, mut b) = (lo.ln(), lo.ln() + 1.0);
    while f(b.exp()) < target {
        a = b;
        b += 2.0 * (b - lo.ln());
        if b > 700.0 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m.exp()) < target {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-13 {
            break;
        }
    }
    (0.5 * (a + b)).exp()
}

/// One row of a regime map.
#[derive(Clone, Debug, Serialize)]
pub struct RegimeCell {
    pub n: f64,
    pub t: f64,
    pub label: RegimeLabel,
}

/// Classifies a logarithmic `points × points` lattice of `(N, t)`.
pub fn regime_map(
    c: &DerivedConstants<f64>,
    n_range: (f64, f64),
    t_range: (f64, f64),
    points: usize,
    th: RatioThresholds,
) -> Vec<RegimeCell> {
    let axis = |(a, b): (f64, f64)| -> Vec<f64> {
        if points <= 1 {
            return vec![a];
        }
        (0..points)
            .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (points - 1) as f64).exp())
            .collect()
    };
    let ns = axis(n_range);
    let ts = axis(t_range);
    let mut out = Vec::with_capacity(ns.len() * ts.len());
    for &n in &ns {
        for &t in &ts {
            out.push(RegimeCell {
                n,
                t,
                label: classify_regime(c, n, t, th),
            });
        }
    }
    out
}

pub fn write_regime_csv<W: Write>(cells: &[RegimeCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = crate::volterra::csv_err;
    w.write_record([
        "N",
        "t",
        "stage",
        "theorem",
        "r_over_n",
        "mu2_over_n",
        "n_tail",
        "final_scale",
        "type1_absence_unresolved",
    ])
    .map_err(err)?;
    for cell in cells {
        let d = &cell.label.diagnostics;
        w.write_record([
            format!("{}", cell.n),
            format!("{}", cell.t),
            cell.label.stage.to_string(),
            cell.label.theorem.to_string(),
            format!("{:e}", d.r_over_n),
            format!("{:e}", d.mu2_over_n),
            format!("{:e}", d.n_tail),
            format!("{:e}", d.final_scale),
            cell.label.type1_absence_unresolved.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}
