use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::composite_gl;

/// Light-tailed lifetime families, `1 - G(t) = o(t^-2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LightTail {
    Exponential { rate: f64 },
    Uniform { a: f64, b: f64 },
}

/// Slowly varying factor of a regularly varying tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SlowlyVarying {
    /// `ℓ(t) = c`
    Constant { c: f64 },
    /// `ℓ(t) = c (ln(e + t))^p`
    LogPower { c: f64, p: f64 },
}

impl SlowlyVarying {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            SlowlyVarying::Constant { c } => c,
            SlowlyVarying::LogPower { c, p } => c * (std::f64::consts::E + t).ln().powf(p),
        }
    }

    /// Limit of `ℓ(t)` as `t → ∞` (`+∞`, `0` or a constant).
    pub fn limit(&self) -> f64 {
        match *self {
            SlowlyVarying::Constant { c } => c,
            SlowlyVarying::LogPower { p, .. } if p > 0.0 => f64::INFINITY,
            SlowlyVarying::LogPower { p, .. } if p < 0.0 => 0.0,
            SlowlyVarying::LogPower { c, .. } => c,
        }
    }
}

/// Heavy tail `1 - G(t) = ℓ(t) t^-β` for `t ≥ t0`, and `1` below `t0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoTail {
    pub beta: f64,
    pub scale: f64,
    pub ell: SlowlyVarying,
}

/// Lifetime distribution of one particle type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tail", rename_all = "snake_case")]
pub enum LifetimeLaw {
    Light(LightTail),
    Pareto(ParetoTail),
}

impl LightTail {
    pub fn tail(&self, t: f64) -> f64 {
        match *self {
            LightTail::Exponential { rate } => {
                if t <= 0.0 {
                    1.0
                } else {
                    (-rate * t).exp()
                }
            }
            LightTail::Uniform { a, b } => {
                if t < a {
                    1.0
                } else if t >= b {
                    0.0
                } else {
                    (b - t) / (b - a)
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            LightTail::Exponential { rate } => 1.0 / rate,
            LightTail::Uniform { a, b } => 0.5 * (a + b),
        }
    }

    /// `μ(t) = ∫_0^t (1 - G(w)) dw`.
    pub fn truncated_mean(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            LightTail::Exponential { rate } => -(-rate * t).exp_m1() / rate,
            LightTail::Uniform { a, b } => {
                if t <= a {
                    t
                } else if t >= b {
                    self.mean()
                } else {
                    a + ((b - a) * (b - a) - (b - t) * (b - t)) / (2.0 * (b - a))
                }
            }
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            LightTail::Exponential { rate } => -(-u).ln_1p() / rate,
            LightTail::Uniform { a, b } => a + u * (b - a),
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            LightTail::Exponential { rate } if !(rate > 0.0 && rate.is_finite()) => Err(
                Error::InvalidModel(format!("exponential rate must be positive, got {rate}")),
            ),
            LightTail::Uniform { a, b } if !(a >= 0.0 && b > a && b.is_finite()) => Err(
                Error::InvalidModel(format!("uniform lifetime needs 0 <= a < b, got [{a}, {b}]")),
            ),
            _ => Ok(()),
        }
    }
}

impl ParetoTail {
    pub fn new(beta: f64, scale: f64, ell: SlowlyVarying) -> Result<Self> {
        let tail = ParetoTail { beta, scale, ell };
        tail.check()?;
        Ok(tail)
    }

    /// `1 - G(t) = min(1, t^-β)`.
    pub fn standard(beta: f64) -> Result<Self> {
        Self::new(beta, 1.0, SlowlyVarying::Constant { c: 1.0 })
    }

    pub(crate) fn check(&self) -> Result<()> {
        let ParetoTail { beta, scale, ell } = *self;
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::BetaOutOfRange(beta));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidModel(format!("Pareto scale must be positive, got {scale}")));
        }
        let c = match ell {
            SlowlyVarying::Constant { c } | SlowlyVarying::LogPower { c, .. } => c,
        };
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidModel(format!("slowly varying factor needs c > 0, got {c}")));
        }
        let at_scale = ell.eval(scale) * scale.powf(-beta);
        if at_scale > 1.0 + 1e-12 {
            return Err(Error::InvalidModel(format!(
                "tail at the scale point is {at_scale} > 1"
            )));
        }
        if let SlowlyVarying::LogPower { p, .. } = ell {
            // d/dt ln(ℓ(t) t^-β) <= 0 for t >= t0 is implied by p / ln(e + t0) <= β
            if p > 0.0 && p / (std::f64::consts::E + scale).ln() > beta {
                return Err(Error::InvalidModel(format!(
                    "tail not monotone beyond t0 = {scale} for p = {p}, beta = {beta}"
                )));
            }
        }
        Ok(())
    }

    pub fn tail(&self, t: f64) -> f64 {
        if t < self.scale {
            1.0
        } else {
            (self.ell.eval(t) * t.powf(-self.beta)).min(1.0)
        }
    }

    /// Mass of the atom at `t0` (zero when the tail is continuous there).
    pub fn atom_at_scale(&self) -> f64 {
        1.0 - self.tail(self.scale)
    }

    /// Inverse CDF: smallest `t` with `G(t) > u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let target = 1.0 - u;
        if target >= self.tail(self.scale) {
            return self.scale;
        }
        match self.ell {
            SlowlyVarying::Constant { c } => (c / target).powf(1.0 / self.beta),
            SlowlyVarying::LogPower { c, p } => {
                // Newton in x = ln t on ln ℓ(e^x) - βx = ln(target)
                let e = std::f64::consts::E;
                let goal = target.ln();
                let g = |x: f64| c.ln() + p * (e + x.exp()).ln().ln() - self.beta * x - goal;
                let dg = |x: f64| {
                    let w = x.exp();
                    p * w / ((e + w) * (e + w).ln()) - self.beta
                };
                let mut lo = self.scale.ln();
                let mut x = ((c.ln() - goal) / self.beta).max(lo);
                let mut hi = x.max(lo) + 1.0;
                while g(hi) > 0.0 {
                    hi += (hi - lo).max(1.0);
                }
                for _ in 0..100 {
                    let gx = g(x);
                    if gx > 0.0 {
                        lo = x;
                    } else {
                        hi = x;
                    }
                    let mut next = x - gx / dg(x);
                    if !(next > lo && next < hi) {
                        next = 0.5 * (lo + hi);
                    }
                    if (next - x).abs() < 1e-14 * x.abs().max(1.0) {
                        x = next;
                        break;
                    }
                    x = next;
                }
                x.exp()
            }
        }
    }

    /// `μ₂(t) = ∫_0^t (1 - G₂(w)) dw`.
    pub fn mu2(&self, t: f64) -> f64 {
        if t <= self.scale {
            return t.max(0.0);
        }
        let (b, t0) = (self.beta, self.scale);
        match self.ell {
            SlowlyVarying::Constant { c } => {
                if b == 1.0 {
                    t0 + c * (t / t0).ln()
                } else {
                    t0 + c * (t.powf(1.0 - b) - t0.powf(1.0 - b)) / (1.0 - b)
                }
            }
            SlowlyVarying::LogPower { .. } => {
                // x = ln w turns the integrand into ℓ(e^x) e^{(1-β)x}
                let (x0, x1) = (t0.ln(), t.ln());
                let panels = ((x1 - x0) / 0.25).ceil().max(1.0) as usize;
                t0 + composite_gl(
                    |x| {
                        let w = x.exp();
                        self.ell.eval(w) * w.powf(1.0 - b)
                    },
                    x0,
                    x1,
                    panels,
                    8,
                )
            }
        }
    }

    /// `R(t) = t / μ₂(t) ≥ 1` (and `R(0) = 1`).
    pub fn r(&self, t: f64) -> f64 {
        if t <= self.scale {
            1.0
        } else {
            t / self.mu2(t)
        }
    }

    /// `μ₂ = μ₂(∞)` when finite (only `β = 1` with an integrable `ℓ(t)/t`).
    pub fn total_mean(&self) -> Option<f64> {
        if self.beta < 1.0 {
            return None;
        }
        match self.ell {
            SlowlyVarying::Constant { .. } => None,
            SlowlyVarying::LogPower { c, p } => {
                if p >= -1.0 {
                    return None;
                }
                let x0 = self.scale.ln();
                let x1 = x0 + 400.0;
                let body = composite_gl(|x| self.ell.eval(x.exp()), x0, x1, 1600, 8);
                // remainder: ln(e + e^x) ≈ x for large x
                let rest = c * x1.powf(p + 1.0) / (-p - 1.0);
                Some(self.scale + body + rest)
            }
        }
    }
}

impl LifetimeLaw {
    pub fn check(&self) -> Result<()> {
        match self {
            LifetimeLaw::Light(l) => l.check(),
            LifetimeLaw::Pareto(p) => p.check(),
        }
    }

    /// `1 - G(t)`.
    pub fn tail(&self, t: f64) -> f64 {
        match self {
            LifetimeLaw::Light(l) => l.tail(t),
            LifetimeLaw::Pareto(p) => p.tail(t),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        1.0 - self.tail(t)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            LifetimeLaw::Light(l) => l.quantile(u),
            LifetimeLaw::Pareto(p) => p.quantile(u),
        }
    }

    pub fn truncated_mean(&self, t: f64) -> f64 {
        match self {
            LifetimeLaw::Light(l) => l.truncated_mean(t),
            LifetimeLaw::Pareto(p) => p.mu2(t),
        }
    }

    /// `μ = μ(∞)`, `None` when infinite.
    pub fn mean(&self) -> Option<f64> {
        match self {
            LifetimeLaw::Light(l) => Some(l.mean()),
            LifetimeLaw::Pareto(p) => p.total_mean(),
        }
    }

    pub fn as_pareto(&self) -> Option<&ParetoTail> {
        match self {
            LifetimeLaw::Pareto(p) => Some(p),
            LifetimeLaw::Light(_) => None,
        }
    }
}

/// `sample_lifetime`: inverse-CDF draw for a uniform `u ∈ [0,1)`.
pub fn sample_lifetime(law: &LifetimeLaw, u: f64) -> f64 {
    law.quantile(u)
}

/// `(μ₂(t), R(t))` for a heavy-tailed law.
pub fn mu2_and_r(law: &ParetoTail, t: f64) -> (f64, f64) {
    (law.mu2(t), law.r(t))
}
