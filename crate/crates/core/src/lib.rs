//! Two-type critical Bellman–Harris processes with a heavy-tailed type.

pub mod error;
pub mod harness;
pub mod limits;
pub mod linalg;
pub mod model;
pub mod quad;
pub mod regimes;
pub mod scalar;
pub mod sim;
pub mod volterra;

pub use error::{Error, Result};
pub use linalg::{Mat2, Vec2};
pub use model::{BranchingModel, DerivedConstants, LifetimeLaw, ModelFile, ValidationReport};
pub use scalar::{Real, Scalar};

pub use num_rational::Rational64;

pub type Model = BranchingModel<f64>;
pub type ExactModel = BranchingModel<Rational64>;
pub type Constants = DerivedConstants<f64>;
pub type ExactConstants = DerivedConstants<Rational64>;
