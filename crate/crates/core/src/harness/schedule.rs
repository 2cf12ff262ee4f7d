use crate::error::{Error, Result};
use crate::model::DerivedConstants;

use super::config::{CurveQuantity, Schedule, SchedulePoint};

/// Part of `quantity` that depends on `t` only: the quantity is
/// `per_n / N` (`μ₂`, `R`) or `N · per_n` (final scale).
fn t_factor(c: &DerivedConstants<f64>, quantity: CurveQuantity, t: f64) -> f64 {
    match quantity {
        CurveQuantity::Mu2OverN => c.mu2(t),
        CurveQuantity::ROverN => c.r(t),
        CurveQuantity::FinalScale => (c.k_survival() * c.tail(t)).sqrt(),
    }
}

pub fn curve_value(c: &DerivedConstants<f64>, quantity: CurveQuantity, n: u64, t: f64) -> f64 {
    let f = t_factor(c, quantity, t);
    match quantity {
        CurveQuantity::FinalScale => n as f64 * f,
        _ => f / n as f64,
    }
}

/// The `t` at which `curve_value(quantity, n, t) = ratio`.
pub fn solve_t(c: &DerivedConstants<f64>, quantity: CurveQuantity, n: u64, ratio: f64) -> Result<f64> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Config(format!("curve ratio must be positive, got {ratio}")));
    }
    let target = match quantity {
        CurveQuantity::FinalScale => ratio / n as f64,
        _ => ratio * n as f64,
    };
    let increasing = quantity != CurveQuantity::FinalScale;
    let f = |t: f64| t_factor(c, quantity, t);
    let below = |t: f64| if increasing { f(t) < target } else { f(t) > target };
    let unreachable = || {
        Error::Config(format!(
            "no horizon gives {quantity:?} = {ratio} at N = {n}"
        ))
    };
    // Search in ln t from the tail scale, where all three factors are strictly monotone.
    let mut lo = c.tail2.scale.max(f64::MIN_POSITIVE);
    if !below(lo) {
        if quantity == CurveQuantity::Mu2OverN && target <= lo {
            return Ok(target);
        }
        return Err(unreachable());
    }
    let mut hi = lo * 2.0;
    while below(hi) {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() || hi > 1e300 {
            return Err(unreachable());
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    Ok(hi)
}

/// Rounded `N` with `curve_value(quantity, N, t) ≈ ratio`.
pub fn solve_n(c: &DerivedConstants<f64>, quantity: CurveQuantity, t: f64, ratio: f64) -> Result<u64> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Config(format!("curve ratio must be positive, got {ratio}")));
    }
    let f = t_factor(c, quantity, t);
    let n = match quantity {
        CurveQuantity::FinalScale => ratio / f,
        _ => f / ratio,
    };
    if !(0.5..9e18).contains(&n) {
        return Err(Error::Config(format!(
            "{quantity:?} = {ratio} at t = {t} needs N = {n}"
        )));
    }
    Ok(n.round() as u64)
}

/// Expands a schedule into explicit points.
pub fn resolve_schedule(c: &DerivedConstants<f64>, schedule: &Schedule) -> Result<Vec<SchedulePoint>> {
    let points = match schedule {
        Schedule::Points { points } => points.clone(),
        Schedule::SolveT { quantity, ratio, n } => n
            .iter()
            .map(|&n| Ok(SchedulePoint { n, t: solve_t(c, *quantity, n, *ratio)? }))
            .collect::<Result<_>>()?,
        Schedule::SolveN { quantity, ratios, t } => ratios
            .iter()
            .map(|&r| Ok(SchedulePoint { n: solve_n(c, *quantity, *t, r)?, t: *t }))
            .collect::<Result<_>>()?,
    };
    for p in &points {
        if p.n == 0 || !(p.t >= 0.0 && p.t.is_finite()) {
            return Err(Error::Config(format!("bad schedule point {p:?}")));
        }
    }
    Ok(points)
}
