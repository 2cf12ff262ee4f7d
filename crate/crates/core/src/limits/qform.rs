use crate::linalg::{Mat2, Vec2};
use crate::model::BranchingModel;
use crate::scalar::{Real, Scalar};
use crate::volterra::ComplementPgf;

/// `N_i(x) = ½ Σ_jk b^i_jk x_j x_k`.
#[derive(Clone, Debug)]
pub struct QuadraticForm<F> {
    pub b: [Mat2<F>; 2],
}

impl<F: Real> QuadraticForm<F> {
    pub fn from_model<T: Scalar>(model: &BranchingModel<T>) -> Self {
        let b = model.second_derivatives();
        Self {
            b: [
                b[0].map(|x| F::c(x.to_f64_lossy())),
                b[1].map(|x| F::c(x.to_f64_lossy())),
            ],
        }
    }

    pub fn eval(&self, x: &Vec2<F>) -> Vec2<F> {
        let half = F::c(0.5);
        Vec2::new(
            half * x.dot(&self.b[0].mul_vec(x)),
            half * x.dot(&self.b[1].mul_vec(x)),
        )
    }

    /// `b̄` with `‖N(x)‖∞ ≤ b̄ ‖x‖∞²`.
    pub fn bound(&self) -> F {
        let half = F::c(0.5);
        let s = |m: &Mat2<F>| m.entries().iter().fold(F::zero(), |a, &x| a + x.abs());
        half * s(&self.b[0]).max(s(&self.b[1]))
    }
}

/// `Φ(x) = M x − (1 − f(1 − x))`.
#[derive(Clone, Debug)]
pub struct Phi<F> {
    m: Mat2<F>,
    complement: ComplementPgf<F>,
}

impl<F: Real> Phi<F> {
    pub fn from_model<T: Scalar>(model: &BranchingModel<T>) -> Self {
        Self {
            m: model.mean_matrix().map(|x| F::c(x.to_f64_lossy())),
            complement: ComplementPgf::new(model),
        }
    }

    pub fn eval(&self, x: &Vec2<F>) -> Vec2<F> {
        let g = self.complement.eval(x.0);
        self.m.mul_vec(x) - Vec2(g)
    }
}
