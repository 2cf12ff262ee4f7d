use crate::linalg::Vec2;
use crate::scalar::Real;

/// Uniform nodes on `[0, max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformAxis {
    pub max: f64,
    pub points: usize,
}

impl UniformAxis {
    pub fn new(max: f64, points: usize) -> Self {
        assert!(points >= 2, "axis needs two points");
        Self { max, points }
    }

    pub fn step(&self) -> f64 {
        self.max / (self.points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.step() * i as f64
    }

    /// Left index and weight of `x` for linear interpolation, clamped.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let pos = (x / self.step()).clamp(0.0, (self.points - 1) as f64);
        let i = (pos.floor() as usize).min(self.points - 2);
        (i, pos - i as f64)
    }

    pub fn interp<F: Real>(&self, values: &[Vec2<F>], x: f64) -> Vec2<F> {
        let (i, w) = self.locate(x);
        let w = F::c(w);
        let (a, b) = (values[i], values[i + 1]);
        Vec2::new(a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1]))
    }
}

pub(crate) fn sup_diff<F: Real>(a: &[Vec2<F>], b: &[Vec2<F>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            (x[0] - y[0])
                .abs()
                .max((x[1] - y[1]).abs())
                .to_f64_lossy()
        })
        .fold(0.0, f64::max)
}

/// Record of a Picard run.
#[derive(Clone, Debug)]
pub struct PicardTrace {
    /// `‖X⁽ⁿ⁺¹⁾ − X⁽ⁿ⁾‖∞` for each step.
    pub diffs: Vec<f64>,
    pub converged: bool,
}

impl PicardTrace {
    /// Largest ratio of consecutive step sizes, ignoring steps at rounding level.
    pub fn kappa(&self) -> f64 {
        self.diffs
            .windows(2)
            .filter(|w| w[0] > 1e-11)
            .map(|w| w[1] / w[0])
            .fold(0.0, f64::max)
    }

    pub fn iterations(&self) -> usize {
        self.diffs.len()
    }

    pub fn residual(&self) -> f64 {
        self.diffs.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Iterates `x ← map(x)` until the step is below `tol`, `max_iter` is hit or
/// the steps keep growing.
pub(crate) fn picard<F: Real>(
    mut x: Vec<Vec2<F>>,
    map: impl Fn(&[Vec2<F>]) -> Vec<Vec2<F>>,
    tol: f64,
    max_iter: usize,
) -> (Vec<Vec2<F>>, PicardTrace) {
    let mut diffs = Vec::new();
    let mut growing = 0;
    let mut converged = false;
    for _ in 0..max_iter {
        let next = map(&x);
        let d = sup_diff(&next, &x);
        if let Some(&prev) = diffs.last() {
            growing = if d > prev { growing + 1 } else { 0 };
        }
        diffs.push(d);
        x = next;
        if !d.is_finite() || growing >= 8 {
            break;
        }
        if d <= tol {
            converged = true;
            break;
        }
    }
    (x, PicardTrace { diffs, converged })
}

/// Composite midpoint nodes `(x_m, w_m)` on `[0, len]`.
pub(crate) fn midpoints(count: usize, len: f64) -> impl Iterator<Item = (f64, f64)> {
    let h = len / count as f64;
    (0..count).map(move |m| ((m as f64 + 0.5) * h, h))
}
