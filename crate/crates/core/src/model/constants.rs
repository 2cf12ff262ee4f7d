use serde::Serialize;

use super::lifetime::ParetoTail;
use super::BranchingModel;
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::scalar::{Real, Scalar};

pub const PERRON_TOLERANCE: f64 = 1e-9;

/// Dominant eigenvalue of a nonnegative 2×2 matrix, in `f64`.
pub fn perron_root<T: Scalar>(m: &Mat2<T>) -> f64 {
    let m = m.to_f64();
    let tr = m.trace();
    let disc = (tr * tr - 4.0 * m.det()).max(0.0);
    0.5 * (tr + disc.sqrt())
}

/// Right (`u`) and left (`v`) Perron eigenvectors of a critical mean matrix,
/// normalized by `v·1 = 1` and `v·u = 1`.
pub fn perron_eigenvectors<T: Scalar>(m: &Mat2<T>) -> Result<(Vec2<T>, Vec2<T>)> {
    let root = perron_root(m);
    if !((root - 1.0).abs() <= PERRON_TOLERANCE) {
        return Err(Error::NonCriticalMatrix { root });
    }
    let one = T::one();
    let g = |i: usize, j: usize| m.get(i, j);
    // rows of M - I are proportional; pick a nonzero one
    let u = if !g(0, 1).is_zero() || !(one.clone() - g(0, 0)).is_zero() {
        Vec2::new(g(0, 1), one.clone() - g(0, 0))
    } else {
        Vec2::new(one.clone() - g(1, 1), g(1, 0))
    };
    let v = if !g(1, 0).is_zero() || !(one.clone() - g(0, 0)).is_zero() {
        Vec2::new(g(1, 0), one.clone() - g(0, 0))
    } else {
        Vec2::new(one.clone() - g(1, 1), g(0, 1))
    };
    let v = v.scale(one.clone() / v.sum());
    let u = u.scale(one / v.dot(&u));
    if u[0] <= T::zero() || u[1] <= T::zero() || v[0] <= T::zero() || v[1] <= T::zero() {
        return Err(Error::InvalidModel(format!(
            "Perron eigenvectors are not positive: u = {:?}, v = {:?}",
            u.0, v.0
        )));
    }
    Ok((u, v))
}

/// `B = ½ Σ v_i b^i_jk u_j u_k`.
pub fn constant_b<T: Scalar>(b: &[Mat2<T>; 2], u: &Vec2<T>, v: &Vec2<T>) -> T {
    let mut total = T::zero();
    for i in 0..2 {
        total = total + v[i].clone() * u.dot(&b[i].mul_vec(u));
    }
    total / (T::one() + T::one())
}

/// `Γ_β = sin(πβ) / (πβ(1-β))`, with `Γ_1 = 1`.
pub fn gamma_beta<T: Real>(beta: T) -> Result<T> {
    let b = beta.to_f64_lossy();
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::BetaOutOfRange(b));
    }
    if beta == T::one() {
        return Ok(T::one());
    }
    let pi = T::PI();
    Ok((pi * beta).sin() / (pi * beta * (T::one() - beta)))
}

/// Which asymptotic normalization `D` uses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum DBranch<T> {
    /// `μ₂ = ∞`.
    InfiniteMean,
    /// `μ₂ < ∞` (only possible for `β = 1`).
    FiniteMean { mu1: T, mu2: T },
}

/// `D_ij = u_i v_j μ₂ / (v₁u₁μ₁ + v₂u₂μ₂)`, and its limit `u_i v_j / (v₂u₂)`
/// when `μ₂ = ∞`.
pub fn matrix_d<T: Scalar>(u: &Vec2<T>, v: &Vec2<T>, branch: &DBranch<T>) -> Mat2<T> {
    let denom = match branch {
        DBranch::InfiniteMean => v[1].clone() * u[1].clone(),
        DBranch::FiniteMean { mu1, mu2 } => {
            (v[0].clone() * u[0].clone() * mu1.clone() + v[1].clone() * u[1].clone() * mu2.clone())
                / mu2.clone()
        }
    };
    let mut d = Mat2::zero();
    for i in 0..2 {
        for j in 0..2 {
            d.0[i][j] = u[i].clone() * v[j].clone() / denom.clone();
        }
    }
    d
}

/// Constants shared by the solvers, the limit laws and the classifier.
#[derive(Clone, Debug)]
pub struct DerivedConstants<T> {
    pub m: Mat2<T>,
    pub u: Vec2<T>,
    pub v: Vec2<T>,
    pub b: T,
    pub d: Mat2<T>,
    pub d_branch: DBranch<T>,
    pub beta: f64,
    pub gamma_beta: f64,
    pub mu1: f64,
    pub tail2: ParetoTail,
}

impl<T: Scalar> DerivedConstants<T> {
    pub fn from_model(model: &BranchingModel<T>) -> Result<Self> {
        let m = model.mean_matrix();
        let (u, v) = perron_eigenvectors(&m)?;
        let b = constant_b(&model.second_derivatives(), &u, &v);
        let tail2 = *model.heavy_tail()?;
        let mu1 = model.lifetimes[0]
            .mean()
            .ok_or_else(|| Error::InvalidModel("type-1 lifetime has infinite mean".into()))?;
        let d_branch = match tail2.total_mean() {
            Some(mu2) => DBranch::FiniteMean {
                mu1: T::from_f64_lossy(mu1),
                mu2: T::from_f64_lossy(mu2),
            },
            None => DBranch::InfiniteMean,
        };
        let d = matrix_d(&u, &v, &d_branch);
        Ok(Self {
            gamma_beta: gamma_beta(tail2.beta)?,
            beta: tail2.beta,
            m,
            u,
            v,
            b,
            d,
            d_branch,
            mu1,
            tail2,
        })
    }

    pub fn mu2(&self, t: f64) -> f64 {
        self.tail2.mu2(t)
    }

    pub fn r(&self, t: f64) -> f64 {
        self.tail2.r(t)
    }

    /// `1 - G₂(t)`.
    pub fn tail(&self, t: f64) -> f64 {
        self.tail2.tail(t)
    }

    /// `v₂u₂/B`.
    pub fn k_survival(&self) -> f64 {
        (self.v[1].clone() * self.u[1].clone() / self.b.clone()).to_f64_lossy()
    }

    pub fn to_f64(&self) -> DerivedConstants<f64> {
        DerivedConstants {
            m: self.m.to_f64(),
            u: self.u.to_f64(),
            v: self.v.to_f64(),
            b: self.b.to_f64_lossy(),
            d: self.d.to_f64(),
            d_branch: match &self.d_branch {
                DBranch::InfiniteMean => DBranch::InfiniteMean,
                DBranch::FiniteMean { mu1, mu2 } => DBranch::FiniteMean {
                    mu1: mu1.to_f64_lossy(),
                    mu2: mu2.to_f64_lossy(),
                },
            },
            beta: self.beta,
            gamma_beta: self.gamma_beta,
            mu1: self.mu1,
            tail2: self.tail2,
        }
    }

    /// Residual of the normalization identities `Mu = u`, `vM = v`, `vu = 1`, `v·1 = 1`.
    pub fn eigen_residual(&self) -> f64 {
        let m = self.m.to_f64();
        let (u, v) = (self.u.to_f64(), self.v.to_f64());
        (m.mul_vec(&u) - u).norm1()
            + (m.left_mul_vec(&v) - v).norm1()
            + (v.dot(&u) - 1.0).abs()
            + (v.sum() - 1.0).abs()
    }
}
