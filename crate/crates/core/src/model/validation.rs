use std::fmt;

use serde::Serialize;

use super::constants::{constant_b, perron_eigenvectors, perron_root, PERRON_TOLERANCE};
use super::lifetime::{LifetimeLaw, SlowlyVarying};
use super::BranchingModel;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckKind {
    ProbabilitiesNormalized,
    Criticality,
    Indecomposable,
    Aperiodic,
    NoAtomAtZero,
    LightTail,
    TailIndexRange,
    ParetoShape,
    HypothesisA,
    SecondMoments,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, kind: CheckKind) -> Option<&Check> {
        self.checks.iter().find(|c| c.kind == kind)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.kind, c.detail))
            .collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "{mark} {:<24} {}", c.kind.to_string(), c.detail)?;
        }
        write!(f, "overall: {}", if self.passed() { "pass" } else { "fail" })
    }
}

/// Checks every standing assumption. Failures are reported, never thrown.
pub fn validate_model<T: Scalar>(model: &BranchingModel<T>) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |kind, passed, detail: String| checks.push(Check { kind, passed, detail });

    let sums: Vec<f64> = model
        .offspring
        .iter()
        .map(|law| law.outcomes().iter().map(|o| o.prob.to_f64_lossy()).sum())
        .collect();
    push(
        CheckKind::ProbabilitiesNormalized,
        sums.iter().all(|s| (s - 1.0).abs() <= 1e-12),
        format!("sums {sums:?}"),
    );

    let m = model.mean_matrix();
    let root = perron_root(&m);
    push(
        CheckKind::Criticality,
        (root - 1.0).abs() <= PERRON_TOLERANCE,
        format!("Perron root {root}"),
    );

    let mf = m.to_f64();
    let m2 = mf * mf;
    let sum = mf + m2;
    push(
        CheckKind::Indecomposable,
        sum.entries().iter().all(|&x| x > 0.0),
        format!("M + M^2 = {:?}", sum.0),
    );
    push(
        CheckKind::Aperiodic,
        m2.entries().iter().all(|&x| x > 0.0),
        format!("M^2 = {:?}", m2.0),
    );

    let at_zero = [model.lifetimes[0].tail(0.0), model.lifetimes[1].tail(0.0)];
    push(
        CheckKind::NoAtomAtZero,
        at_zero.iter().all(|&x| x == 1.0),
        format!("1 - G(0) = {at_zero:?}"),
    );

    let light = match &model.lifetimes[0] {
        LifetimeLaw::Light(l) => {
            let law = model.lifetimes[0].clone();
            match law.check() {
                Ok(()) => (true, format!("{l:?}")),
                Err(e) => (false, e.to_string()),
            }
        }
        LifetimeLaw::Pareto(_) => (false, "type-1 lifetime must be light tailed".into()),
    };
    push(CheckKind::LightTail, light.0, light.1);

    match &model.lifetimes[1] {
        LifetimeLaw::Pareto(p) => {
            push(
                CheckKind::TailIndexRange,
                p.beta > 0.0 && p.beta <= 1.0,
                format!("beta = {}", p.beta),
            );
            let shape = p.check();
            push(
                CheckKind::ParetoShape,
                shape.is_ok() || !(p.beta > 0.0 && p.beta <= 1.0),
                match shape {
                    Ok(()) => format!("t0 = {}, ell = {:?}", p.scale, p.ell),
                    Err(e) => e.to_string(),
                },
            );
            if p.beta <= 0.5 {
                let (ok, detail) = hypothesis_a(p.scale, |t| p.tail(t), p.ell);
                push(CheckKind::HypothesisA, ok, detail);
            }
        }
        LifetimeLaw::Light(_) => {
            push(
                CheckKind::TailIndexRange,
                false,
                "type-2 lifetime must be Pareto tailed".into(),
            );
        }
    }

    match perron_eigenvectors(&m) {
        Ok((u, v)) => {
            let b = constant_b(&model.second_derivatives(), &u, &v).to_f64_lossy();
            push(CheckKind::SecondMoments, b > 0.0, format!("B = {b}"));
        }
        Err(e) => push(CheckKind::SecondMoments, false, format!("B undefined: {e}")),
    }

    ValidationReport { checks }
}

/// Bounded density of `G₂`: no atom at `t0` and a finite sup of the
/// difference quotient over a logarithmic grid.
fn hypothesis_a(scale: f64, tail: impl Fn(f64) -> f64, ell: SlowlyVarying) -> (bool, String) {
    let atom = 1.0 - tail(scale);
    if atom > 1e-12 {
        return (false, format!("atom of mass {atom} at t0 = {scale}"));
    }
    let mut sup: f64 = 0.0;
    let dt = 1e-6 * scale;
    for k in 0..400 {
        let t = scale * 10f64.powf(k as f64 * 0.05);
        sup = sup.max((tail(t) - tail(t + dt)) / dt);
    }
    let ok = sup.is_finite() && ell.eval(scale) > 0.0;
    (ok, format!("sup density ~ {sup:.4}"))
}
