use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::model::DerivedConstants;
use crate::scalar::Real;

use super::picard::{midpoints, picard, PicardTrace, UniformAxis};
use super::qform::QuadraticForm;

/// Options for [`solve_theta`].
#[derive(Clone, Debug)]
pub struct ThetaOptions {
    /// Initial domain bound; halved until the measured contraction is small.
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub kappa_target: f64,
    pub lambda_floor: f64,
    pub start: ThetaStart,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        Self {
            lambda_max: 1.0,
            lambda_points: 512,
            nodes: 1024,
            tol: 1e-12,
            max_iter: 500,
            kappa_target: 0.8,
            lambda_floor: 1e-3,
            start: ThetaStart::Boundary,
        }
    }
}

/// First Picard iterate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaStart {
    /// `D(0,1)†`
    Boundary,
    Zero,
    /// `D(0,1)†` times the factor.
    Scaled(f64),
}

/// Converged `Θ` on `[0, Λ]`.
#[derive(Clone, Debug)]
pub struct ThetaSolution<F> {
    pub axis: UniformAxis,
    pub values: Vec<Vec2<F>>,
    pub kappa: f64,
    pub residual: f64,
    pub trace: PicardTrace,
    pub beta: f64,
}

/// The map `Θ ↦ D(0,1)† − Γ_β λ^β ∫₀¹ D N(Θ(λ(1 − y))) dy^β` on a fixed axis.
///
/// With `z = y^β` the measure becomes `dz` on `[0, 1]`.
pub struct ThetaMap<F> {
    d: Mat2<F>,
    d01: Vec2<F>,
    gamma: F,
    beta: f64,
    qform: QuadraticForm<F>,
    shrink: Vec<(f64, F)>,
}

impl<F: Real> ThetaMap<F> {
    pub fn new(c: &DerivedConstants<f64>, qform: &QuadraticForm<F>, nodes: usize) -> Self {
        let d = c.d.map(|&x| F::c(x));
        let beta = c.beta;
        Self {
            d01: d.col(1),
            d,
            gamma: F::c(c.gamma_beta),
            beta,
            qform: qform.clone(),
            shrink: midpoints(nodes, 1.0)
                .map(|(z, w)| (1.0 - z.powf(1.0 / beta), F::c(w)))
                .collect(),
        }
    }

    pub fn boundary(&self) -> Vec2<F> {
        self.d01
    }

    pub fn apply_at(&self, axis: &UniformAxis, values: &[Vec2<F>], lambda: f64) -> Vec2<F> {
        let mut acc = Vec2::<F>::zero();
        for &(a, w) in &self.shrink {
            let n = self.qform.eval(&axis.interp(values, lambda * a));
            acc = acc + n.scale(w);
        }
        let k = self.gamma * F::c(lambda.powf(self.beta));
        self.d01 - self.d.mul_vec(&acc).scale(k)
    }

    pub fn apply(&self, axis: &UniformAxis, values: &[Vec2<F>]) -> Vec<Vec2<F>> {
        (0..axis.points)
            .map(|i| self.apply_at(axis, values, axis.node(i)))
            .collect()
    }
}

/// Picard solution of the `Θ` equation with the auto-shrinking domain policy.
pub fn solve_theta<F: Real>(
    constants: &DerivedConstants<f64>,
    qform: &QuadraticForm<F>,
    opts: &ThetaOptions,
) -> Result<ThetaSolution<F>> {
    let beta = constants.beta;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::BetaOutOfRange(beta));
    }
    let map = ThetaMap::new(constants, qform, opts.nodes);
    let start = |axis: &UniformAxis| match opts.start {
        ThetaStart::Boundary => vec![map.boundary(); axis.points],
        ThetaStart::Zero => vec![Vec2::zero(); axis.points],
        ThetaStart::Scaled(k) => vec![map.boundary().scale(F::c(k)); axis.points],
    };
    let mut lambda = opts.lambda_max;
    let mut probe_kappa;
    loop {
        let axis = UniformAxis::new(lambda, opts.lambda_points);
        let (_, probe) = picard(start(&axis), |x| map.apply(&axis, x), 0.0, 3);
        probe_kappa = probe.kappa();
        if probe_kappa <= opts.kappa_target {
            break;
        }
        lambda *= 0.5;
        if lambda < opts.lambda_floor {
            return Err(Error::ContractionFailed {
                kappa: probe_kappa,
                domain: lambda,
            });
        }
    }
    let axis = UniformAxis::new(lambda, opts.lambda_points);
    let (values, trace) = picard(start(&axis), |x| map.apply(&axis, x), opts.tol, opts.max_iter);
    let kappa = trace.kappa().max(probe_kappa);
    if !trace.converged || kappa >= 1.0 {
        return Err(Error::ContractionFailed {
            kappa,
            domain: lambda,
        });
    }
    let residual = super::picard::sup_diff(&map.apply(&axis, &values), &values);
    Ok(ThetaSolution {
        axis,
        values,
        kappa,
        residual,
        trace,
        beta,
    })
}

/// Continues Picard on doubled domains up to `target`, seeding each from the
/// previous solution; accepted only with residual at most `max_residual`.
pub fn extend_theta<F: Real>(
    solution: &ThetaSolution<F>,
    constants: &DerivedConstants<f64>,
    qform: &QuadraticForm<F>,
    target: f64,
    opts: &ThetaOptions,
    max_residual: f64,
) -> Result<ThetaSolution<F>> {
    let map = ThetaMap::new(constants, qform, opts.nodes);
    let mut current = solution.clone();
    while current.axis.max < target {
        let axis = UniformAxis::new((2.0 * current.axis.max).min(target), opts.lambda_points);
        let seed = (0..axis.points)
            .map(|i| current.axis.interp(&current.values, axis.node(i)))
            .collect();
        let (values, trace) = picard(seed, |x| map.apply(&axis, x), opts.tol, opts.max_iter);
        let residual = super::picard::sup_diff(&map.apply(&axis, &values), &values);
        if !trace.converged || residual > max_residual {
            return Err(Error::ContractionFailed {
                kappa: trace.kappa(),
                domain: axis.max,
            });
        }
        current = ThetaSolution {
            axis,
            values,
            kappa: trace.kappa(),
            residual,
            trace,
            beta: current.beta,
        };
    }
    Ok(current)
}

impl<F: Real> ThetaSolution<F> {
    pub fn eval(&self, lambda: f64) -> Result<Vec2<F>> {
        if !(lambda >= 0.0 && lambda <= self.axis.max * (1.0 + 1e-12)) {
            return Err(Error::OutsideDomain {
                arg: lambda,
                max: self.axis.max,
            });
        }
        Ok(self.axis.interp(&self.values, lambda))
    }

    /// Largest `λ` with `λ^{1/β}` inside the solved domain.
    pub fn omega_max(&self) -> f64 {
        self.axis.max.powf(self.beta)
    }

    /// `Ω(λ) = λ Θ(λ^{1/β})`.
    pub fn omega(&self, lambda: f64) -> Result<Vec2<F>> {
        let x = lambda.powf(1.0 / self.beta);
        if !(lambda >= 0.0 && x <= self.axis.max * (1.0 + 1e-12)) {
            return Err(Error::OutsideDomain {
                arg: lambda,
                max: self.omega_max(),
            });
        }
        Ok(self.axis.interp(&self.values, x).scale(F::c(lambda)))
    }

    /// Sup-norm gap between `Ω(λ)` and the right side
    /// `D(0,λ)† − Γ_β ∫₀¹ D N(Ω(λ(1−w)^β)) (1−w)^{-2β} dw^β`.
    pub fn omega_residual(
        &self,
        constants: &DerivedConstants<f64>,
        qform: &QuadraticForm<F>,
        lambda: f64,
        nodes: usize,
    ) -> Result<f64> {
        let beta = self.beta;
        let d = constants.d.map(|&x| F::c(x));
        let mut acc = Vec2::<F>::zero();
        for (z, h) in midpoints(nodes, 1.0) {
            let one_minus_w = 1.0 - z.powf(1.0 / beta);
            let inner = self.omega(lambda * one_minus_w.powf(beta))?;
            let weight = F::c(h * one_minus_w.powf(-2.0 * beta));
            acc = acc + qform.eval(&inner).scale(weight);
        }
        let rhs = d.col(1).scale(F::c(lambda)) - d.mul_vec(&acc).scale(F::c(constants.gamma_beta));
        let lhs = self.omega(lambda)?;
        Ok((lhs[0] - rhs[0])
            .abs()
            .max((lhs[1] - rhs[1]).abs())
            .to_f64_lossy())
    }
}
