//! Two-type process specification, standing-assumption checks and derived
//! constants.

mod constants;
mod file;
mod lifetime;
mod offspring;
mod validation;

pub use constants::{
    constant_b, gamma_beta, matrix_d, perron_eigenvectors, perron_root, DBranch,
    DerivedConstants, PERRON_TOLERANCE,
};
pub use file::{LifetimeSpec, ModelFile, OffspringSpec, OutcomeSpec, Probability};
pub use lifetime::{
    mu2_and_r, sample_lifetime, LifetimeLaw, LightTail, ParetoTail, SlowlyVarying,
};
pub use offspring::{sample_offspring, OffspringLaw, OffspringSampler, Outcome};
pub use validation::{validate_model, Check, CheckKind, ValidationReport};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::scalar::Scalar;

/// Offspring laws and lifetime laws of both types. Type 1 is light tailed,
/// type 2 carries the regularly varying tail.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchingModel<T> {
    pub offspring: [OffspringLaw<T>; 2],
    pub lifetimes: [LifetimeLaw; 2],
}

impl<T: Scalar> BranchingModel<T> {
    pub fn new(offspring: [OffspringLaw<T>; 2], lifetimes: [LifetimeLaw; 2]) -> Self {
        Self {
            offspring,
            lifetimes,
        }
    }

    /// `f₁(s) = s₂`, `f₂(s) = ¼(1 + s₁ + s₁s₂ + s₂)`, type-1 lifetime Exp(1),
    /// type-2 tail `min(1, t^-β)`.
    pub fn reference(beta: f64) -> Self {
        let quarter = T::one() / T::from_count(4);
        let f1 = OffspringLaw::from_pairs([((0, 1), T::one())]).expect("valid law");
        let f2 = OffspringLaw::from_pairs([
            ((0, 0), quarter.clone()),
            ((1, 0), quarter.clone()),
            ((1, 1), quarter.clone()),
            ((0, 1), quarter),
        ])
        .expect("valid law");
        Self::new(
            [f1, f2],
            [
                LifetimeLaw::Light(LightTail::Exponential { rate: 1.0 }),
                LifetimeLaw::Pareto(ParetoTail {
                    beta,
                    scale: 1.0,
                    ell: SlowlyVarying::Constant { c: 1.0 },
                }),
            ],
        )
    }

    /// `M = (m_ij)`.
    pub fn mean_matrix(&self) -> Mat2<T> {
        let r0 = self.offspring[0].means();
        let r1 = self.offspring[1].means();
        Mat2([r0.0, r1.0])
    }

    /// `b^i_jk` for `i = 1, 2`.
    pub fn second_derivatives(&self) -> [Mat2<T>; 2] {
        [
            self.offspring[0].second_derivatives(),
            self.offspring[1].second_derivatives(),
        ]
    }

    /// `f(s) = (f₁(s), f₂(s))`.
    pub fn pgf(&self, s: &Vec2<T>) -> Vec2<T> {
        Vec2::new(self.offspring[0].pgf(s), self.offspring[1].pgf(s))
    }

    pub fn heavy_tail(&self) -> Result<&ParetoTail> {
        self.lifetimes[1]
            .as_pareto()
            .ok_or_else(|| Error::InvalidModel("type-2 lifetime must be Pareto tailed".into()))
    }

    pub fn beta(&self) -> Result<f64> {
        Ok(self.heavy_tail()?.beta)
    }

    pub fn cast<U: Scalar>(&self) -> BranchingModel<U> {
        BranchingModel {
            offspring: [self.offspring[0].cast(), self.offspring[1].cast()],
            lifetimes: self.lifetimes.clone(),
        }
    }

    pub fn constants(&self) -> Result<DerivedConstants<T>> {
        DerivedConstants::from_model(self)
    }

    /// Runs [`validate_model`] and turns a failing report into an error.
    pub fn validated(self) -> Result<Self> {
        let report = validate_model(&self);
        if report.passed() {
            Ok(self)
        } else {
            Err(Error::InvalidModel(report.failures().join("; ")))
        }
    }
}
