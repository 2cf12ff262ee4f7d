use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::scalar::Scalar;

const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// One atom of an offspring distribution: `children[j]` offspring of type `j+1`
/// produced with probability `prob`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome<T> {
    pub children: [u32; 2],
    pub prob: T,
}

/// Finite-support joint law of `(ξ_i1, ξ_i2)` for one parent type.
#[derive(Clone, Debug, PartialEq)]
pub struct OffspringLaw<T> {
    outcomes: Vec<Outcome<T>>,
}

impl<T: Scalar> OffspringLaw<T> {
    pub fn new(outcomes: Vec<Outcome<T>>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidModel("offspring law has no outcomes".into()));
        }
        let mut total = T::zero();
        for o in &outcomes {
            if o.prob < T::zero() {
                return Err(Error::InvalidModel(format!(
                    "negative probability {:?} for outcome {:?}",
                    o.prob, o.children
                )));
            }
            total = total + o.prob.clone();
        }
        let excess = (total - T::one()).to_f64_lossy().abs();
        if !(excess <= PROBABILITY_TOLERANCE) {
            return Err(Error::InvalidModel(format!(
                "offspring probabilities sum to 1{excess:+e}"
            )));
        }
        Ok(Self { outcomes })
    }

    /// Convenience constructor from `((k1, k2), p)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = ((u32, u32), T)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|((a, b), p)| Outcome {
                    children: [a, b],
                    prob: p,
                })
                .collect(),
        )
    }

    pub fn outcomes(&self) -> &[Outcome<T>] {
        &self.outcomes
    }

    /// `f_i(s) = E[s1^ξ1 s2^ξ2]`.
    pub fn pgf(&self, s: &Vec2<T>) -> T {
        self.outcomes.iter().fold(T::zero(), |acc, o| {
            acc + o.prob.clone()
                * num_traits::pow(s[0].clone(), o.children[0] as usize)
                * num_traits::pow(s[1].clone(), o.children[1] as usize)
        })
    }

    /// Row `(m_i1, m_i2)` of the mean matrix.
    pub fn means(&self) -> Vec2<T> {
        let mut m = Vec2::<T>::zero();
        for o in &self.outcomes {
            for j in 0..2 {
                m[j] = m[j].clone() + o.prob.clone() * T::from_count(o.children[j]);
            }
        }
        m
    }

    /// Mixed second derivatives `b_jk = ∂²f/∂s_j∂s_k` at `s = 1`, i.e. second
    /// factorial moments on the diagonal and `E ξ_j ξ_k` off it.
    pub fn second_derivatives(&self) -> Mat2<T> {
        let mut b = Mat2::<T>::zero();
        for o in &self.outcomes {
            for j in 0..2 {
                for k in 0..2 {
                    let kj = T::from_count(o.children[j]);
                    let kk = T::from_count(o.children[k]);
                    let term = if j == k {
                        kj.clone() * (kk - T::one())
                    } else {
                        kj * kk
                    };
                    b.0[j][k] = b.0[j][k].clone() + o.prob.clone() * term;
                }
            }
        }
        b
    }

    pub fn cast<U: Scalar>(&self) -> OffspringLaw<U> {
        OffspringLaw {
            outcomes: self
                .outcomes
                .iter()
                .map(|o| Outcome {
                    children: o.children,
                    prob: U::from_f64_lossy(o.prob.to_f64_lossy()),
                })
                .collect(),
        }
    }

    /// Inverse-CDF sampler over the outcomes in declaration order.
    pub fn sampler(&self) -> OffspringSampler {
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(self.outcomes.len());
        let mut children = Vec::with_capacity(self.outcomes.len());
        for o in &self.outcomes {
            acc += o.prob.to_f64_lossy();
            cumulative.push(acc);
            children.push(o.children);
        }
        OffspringSampler {
            cumulative,
            children,
        }
    }
}

/// Precomputed cumulative table for drawing offspring vectors.
#[derive(Clone, Debug)]
pub struct OffspringSampler {
    cumulative: Vec<f64>,
    children: Vec<[u32; 2]>,
}

impl OffspringSampler {
    /// Outcome whose cumulative bucket contains `u ∈ [0,1)`.
    pub fn sample(&self, u: f64) -> [u32; 2] {
        for (c, k) in self.cumulative.iter().zip(&self.children) {
            if u < *c {
                return *k;
            }
        }
        // u beyond the rounded total mass: last outcome with positive mass
        *self.children.last().unwrap()
    }
}

/// `sample_offspring`: one offspring vector from a uniform draw.
pub fn sample_offspring<T: Scalar>(law: &OffspringLaw<T>, u: f64) -> [u32; 2] {
    law.sampler().sample(u)
}
