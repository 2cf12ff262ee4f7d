//! Lattice solutions of the renewal and generating-function equations.
//!
//! Lifetime distributions are replaced by their step masses on a uniform grid
//! (`dG[k]` sits at `t_k`), which makes every recursion explicit. Causality
//! means the tail of `G₂` beyond the horizon never enters.

mod generating;
mod grid;
mod lattice;
mod renewal;

pub use generating::{
    solve_generating_system, survival_probability, weighted_q, GeneratingSolution, WeightedPoint,
};
pub use grid::{richardson, GridFunction, TimeGrid};
pub use lattice::{LatticeMasses, MAX_STEP_MASS};
pub use renewal::{key_renewal, mean_from_renewal, mean_matrix, renewal_matrix, RenewalSolution};

pub(crate) use generating::ComplementPgf;
pub(crate) use grid::csv_err;
