use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::model::{BranchingModel, ParetoTail};
use crate::quad::composite_gl;
use crate::scalar::Scalar;
use crate::volterra::{solve_generating_system, TimeGrid};

use super::qform::Phi;

/// `O(s)` with the estimated contribution of the truncated tail.
#[derive(Clone, Debug, Serialize)]
pub struct OValue {
    pub s: f64,
    pub value: Vec2<f64>,
    /// `βΓ_β D` applied to the bound on `∫_T^∞ Φ(Q) dw`.
    pub tail: Vec2<f64>,
    pub horizon: f64,
    /// Same estimate with horizon `T/2`.
    pub half_horizon_value: Vec2<f64>,
}

/// `∫_T^∞ dw / μ₂(w)²`, finite only for `β < ½`.
pub fn inverse_square_tail(tail: &ParetoTail, t: f64) -> Option<f64> {
    if tail.beta >= 0.5 {
        return None;
    }
    let x0 = t.max(tail.scale).ln();
    let span = (40.0 / (1.0 - 2.0 * tail.beta)).min(400.0);
    let panels = (span / 0.5).ceil() as usize;
    let head = if t < tail.scale {
        composite_gl(|w| 1.0 / (w * w).max(1e-300), t.max(1e-12), tail.scale, 64, 8)
    } else {
        0.0
    };
    Some(
        head + composite_gl(
            |x| {
                let w = x.exp();
                let m = tail.mu2(w);
                w / (m * m)
            },
            x0,
            x0 + span,
            panels,
            8,
        ),
    )
}

/// `O(s) = βΓ_β D ∫₀^∞ Φ(Q(w; s, 1)) dw` on a lattice of step `step` up to
/// `horizon`, with a `C/μ₂(w)²` tail fitted on the last decade.
pub fn o_functional<T: Scalar>(
    model: &BranchingModel<T>,
    step: f64,
    s: f64,
    horizon: f64,
) -> Result<OValue> {
    let c = model.constants()?.to_f64();
    if !(c.beta > 0.0 && c.beta <= 0.5) {
        return Err(Error::BetaOutOfRange(c.beta));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::ScalingTooLarge { t: 0.0, value: s });
    }
    let grid = TimeGrid::with_horizon(step, horizon)?;
    let sol = solve_generating_system::<T, f64>(model, Vec2::new(s, 1.0), grid)?;
    let phi = Phi::<f64>::from_model(model);
    let values: Vec<Vec2<f64>> = sol.q.values.iter().map(|q| phi.eval(q)).collect();
    let k = c.beta * c.gamma_beta;

    let estimate = |end: usize| -> Result<(Vec2<f64>, Vec2<f64>)> {
        // trapezoid rule over the lattice
        let mut integral = Vec2::<f64>::zero();
        for n in 1..=end {
            integral = integral + (values[n - 1] + values[n]).scale(0.5 * step);
        }
        let t_end = grid.t(end);
        let mut coef = Vec2::<f64>::zero();
        for n in (end / 10)..=end {
            let m = c.mu2(grid.t(n));
            for i in 0..2 {
                coef[i] = coef[i].max(values[n][i] * m * m);
            }
        }
        let tail_int = inverse_square_tail(&c.tail2, t_end).ok_or_else(|| {
            Error::TailNotConverged(format!("tail integral diverges for beta = {}", c.beta))
        })?;
        let tail = c.d.mul_vec(&coef.scale(tail_int)).scale(k);
        Ok((c.d.mul_vec(&integral).scale(k) + tail, tail))
    };
    let last = grid.n_points - 1;
    let (value, tail) = estimate(last)?;
    let (half, _) = estimate(last / 2)?;
    let scale = value.norm1().max(1e-14);
    if (value - half).norm1() > 0.01 * scale {
        return Err(Error::TailNotConverged(format!(
            "O({s}) moved from {:?} to {:?} when doubling the horizon to {horizon}",
            half.0, value.0
        )));
    }
    Ok(OValue {
        s,
        value,
        tail,
        horizon,
        half_horizon_value: half,
    })
}
