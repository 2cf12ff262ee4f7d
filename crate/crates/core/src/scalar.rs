//! Numeric abstractions.
//!
//! Offspring algebra (moments, eigenvectors, `B`, `D`) only needs field
//! operations and runs on [`Scalar`], which includes exact rationals. Anything
//! involving lifetimes, quadrature or transcendental functions runs on
//! [`Real`] (`f32`/`f64`).

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Field-like scalar: `f32`, `f64`, `num_rational::Rational64`, `BigRational`.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("scalar conversion from f64")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_count(k: u32) -> Self {
        Self::from_u32(k).expect("scalar conversion from integer")
    }
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + PartialOrd
        + Num
        + Signed
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Floating point scalar used by the solvers.
pub trait Real: Scalar + Float + FloatConst + Copy {
    fn c(x: f64) -> Self {
        <Self as Scalar>::from_f64_lossy(x)
    }
}

impl Real for f32 {}
impl Real for f64 {}
