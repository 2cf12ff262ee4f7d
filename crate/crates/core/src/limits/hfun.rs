use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::model::DerivedConstants;
use crate::scalar::Real;

use super::picard::{midpoints, picard, sup_diff, PicardTrace, UniformAxis};
use super::qform::QuadraticForm;

#[derive(Clone, Debug)]
pub struct HOptions {
    pub theta_max: f64,
    pub theta_points: usize,
    /// Upper end of the `λ` axis.
    pub lambda_max: f64,
    pub lambda_points: usize,
    /// Midpoint nodes per half of the split integral.
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub kappa_target: f64,
    pub theta_floor: f64,
}

impl Default for HOptions {
    fn default() -> Self {
        Self {
            theta_max: 1.0,
            theta_points: 512,
            lambda_max: 1.0,
            lambda_points: 11,
            nodes: 1024,
            tol: 1e-12,
            max_iter: 500,
            kappa_target: 0.8,
            theta_floor: 1e-3,
        }
    }
}

/// Converged `H(θ, λ)`; `columns[j]` holds the `θ` profile at the `j`-th `λ`.
#[derive(Clone, Debug)]
pub struct HSolution<F> {
    pub theta_axis: UniformAxis,
    pub lambda_axis: UniformAxis,
    pub columns: Vec<Vec<Vec2<F>>>,
    pub c_beta: Mat2<F>,
    pub kappa: f64,
    pub residual: f64,
    pub beta: f64,
}

/// `C_β = [[βΓ_β D₁₁, D₁₂], [βΓ_β D₂₁, D₂₂]]`.
pub fn c_beta(c: &DerivedConstants<f64>) -> Mat2<f64> {
    let k = c.beta * c.gamma_beta;
    Mat2([
        [k * c.d.0[0][0], c.d.0[0][1]],
        [k * c.d.0[1][0], c.d.0[1][1]],
    ])
}

/// Map of one `λ` column:
/// `H ↦ C_β(1, λθ^{1−β})† − Γ_β θ^{2β−1} ∫₀¹ D N(H(θ(1−y))) (1−y)^{2β−2} dy^β`.
///
/// The integral is split at `y = ½`: `z = y^β` on the left half and
/// `w = (1−y)^{2β−1}` on the right, so both integrands stay bounded.
struct HMap<F> {
    d: Mat2<F>,
    c_beta: Mat2<F>,
    gamma: F,
    beta: f64,
    qform: QuadraticForm<F>,
    /// `(1 − y, weight)` over both halves.
    nodes: Vec<(f64, F)>,
}

impl<F: Real> HMap<F> {
    fn new(c: &DerivedConstants<f64>, qform: &QuadraticForm<F>, count: usize) -> Self {
        let beta = c.beta;
        let p = 2.0 * beta - 1.0;
        let mut nodes = Vec::with_capacity(2 * count);
        for (z, h) in midpoints(count, 0.5f64.powf(beta)) {
            let y = z.powf(1.0 / beta);
            nodes.push((1.0 - y, F::c(h * (1.0 - y).powf(2.0 * beta - 2.0))));
        }
        for (w, h) in midpoints(count, 2f64.powf(1.0 - 2.0 * beta)) {
            let one_minus_y = w.powf(1.0 / p);
            let y = 1.0 - one_minus_y;
            nodes.push((one_minus_y, F::c(h * beta * y.powf(beta - 1.0) / p)));
        }
        Self {
            d: c.d.map(|&x| F::c(x)),
            c_beta: c_beta(c).map(|&x| F::c(x)),
            gamma: F::c(c.gamma_beta),
            beta,
            qform: qform.clone(),
            nodes,
        }
    }

    fn bound(&self, theta: f64, lambda: f64) -> Vec2<F> {
        let arg = Vec2::new(F::one(), F::c(lambda * theta.powf(1.0 - self.beta)));
        self.c_beta.mul_vec(&arg)
    }

    fn apply_at(&self, axis: &UniformAxis, col: &[Vec2<F>], theta: f64, lambda: f64) -> Vec2<F> {
        let mut acc = Vec2::<F>::zero();
        for &(a, w) in &self.nodes {
            acc = acc + self.qform.eval(&axis.interp(col, theta * a)).scale(w);
        }
        let k = self.gamma * F::c(theta.powf(2.0 * self.beta - 1.0));
        self.bound(theta, lambda) - self.d.mul_vec(&acc).scale(k)
    }

    fn apply(&self, axis: &UniformAxis, col: &[Vec2<F>], lambda: f64) -> Vec<Vec2<F>> {
        (0..axis.points)
            .map(|i| self.apply_at(axis, col, axis.node(i), lambda))
            .collect()
    }
}

/// Picard solution of the `H` equation, one independent solve per `λ` column.
pub fn solve_h<F: Real>(
    constants: &DerivedConstants<f64>,
    qform: &QuadraticForm<F>,
    opts: &HOptions,
) -> Result<HSolution<F>> {
    let beta = constants.beta;
    if !(beta > 0.5 && beta <= 1.0) {
        return Err(Error::BetaOutOfRange(beta));
    }
    let map = HMap::new(constants, qform, opts.nodes);
    let lambda_axis = UniformAxis::new(opts.lambda_max, opts.lambda_points);
    let start = |axis: &UniformAxis, lambda: f64| -> Vec<Vec2<F>> {
        (0..axis.points)
            .map(|i| map.bound(axis.node(i), lambda))
            .collect()
    };
    // the largest λ column is the least contractive one
    let mut theta_max = opts.theta_max;
    let mut probe_kappa;
    loop {
        let axis = UniformAxis::new(theta_max, opts.theta_points);
        let lam = lambda_axis.max;
        let (_, probe) = picard(start(&axis, lam), |x| map.apply(&axis, x, lam), 0.0, 3);
        probe_kappa = probe.kappa();
        if probe_kappa <= opts.kappa_target {
            break;
        }
        theta_max *= 0.5;
        if theta_max < opts.theta_floor {
            return Err(Error::ContractionFailed {
                kappa: probe_kappa,
                domain: theta_max,
            });
        }
    }
    let theta_axis = UniformAxis::new(theta_max, opts.theta_points);
    let mut columns = Vec::with_capacity(lambda_axis.points);
    let mut kappa = probe_kappa;
    let mut residual: f64 = 0.0;
    for j in 0..lambda_axis.points {
        let lam = lambda_axis.node(j);
        let (col, trace): (_, PicardTrace) = picard(
            start(&theta_axis, lam),
            |x| map.apply(&theta_axis, x, lam),
            opts.tol,
            opts.max_iter,
        );
        kappa = kappa.max(trace.kappa());
        if !trace.converged || kappa >= 1.0 {
            return Err(Error::ContractionFailed {
                kappa,
                domain: theta_max,
            });
        }
        residual = residual.max(sup_diff(&map.apply(&theta_axis, &col, lam), &col));
        columns.push(col);
    }
    Ok(HSolution {
        theta_axis,
        lambda_axis,
        columns,
        c_beta: map.c_beta,
        kappa,
        residual,
        beta,
    })
}

impl<F: Real> HSolution<F> {
    /// Bilinear interpolation of `H(θ, λ)`.
    pub fn eval(&self, theta: f64, lambda: f64) -> Result<Vec2<F>> {
        if !(theta >= 0.0 && theta <= self.theta_axis.max * (1.0 + 1e-12)) {
            return Err(Error::OutsideDomain {
                arg: theta,
                max: self.theta_axis.max,
            });
        }
        if !(lambda >= 0.0 && lambda <= self.lambda_axis.max * (1.0 + 1e-12)) {
            return Err(Error::OutsideDomain {
                arg: lambda,
                max: self.lambda_axis.max,
            });
        }
        let (j, w) = self.lambda_axis.locate(lambda);
        let a = self.theta_axis.interp(&self.columns[j], theta);
        let b = self.theta_axis.interp(&self.columns[j + 1], theta);
        let w = F::c(w);
        Ok(Vec2::new(a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])))
    }

    /// `C_β (1, λθ^{1−β})†`.
    pub fn upper_bound(&self, theta: f64, lambda: f64) -> Vec2<F> {
        let arg = Vec2::new(F::one(), F::c(lambda * theta.powf(1.0 - self.beta)));
        self.c_beta.mul_vec(&arg)
    }
}
