//! Limit objects of the theorems and their predicted transforms.

mod hfun;
mod ofun;
mod picard;
mod predict;
mod qform;
mod theta;

pub use hfun::{c_beta, solve_h, HOptions, HSolution};
pub use ofun::{inverse_square_tail, o_functional, OValue};
pub use picard::{PicardTrace, UniformAxis};
pub use predict::{predict_limit, LimitArgs, SolvedLimits, TheoremId};
pub use qform::{Phi, QuadraticForm};
pub use theta::{extend_theta, solve_theta, ThetaMap, ThetaOptions, ThetaSolution, ThetaStart};
