use crate::error::{Error, Result};
use crate::model::BranchingModel;
use crate::scalar::{Real, Scalar};

use super::grid::TimeGrid;

/// Largest admissible single-step mass of `G₂`.
pub const MAX_STEP_MASS: f64 = 0.5;

/// Per-type survival values `1 - G_i(t_n)` and step masses
/// `dG_i[k] = G_i(t_k) - G_i(t_{k-1})` placed at `t_k` (`dG_i[0] = 0`).
#[derive(Clone, Debug)]
pub struct LatticeMasses<F> {
    pub grid: TimeGrid,
    pub survival: Vec<[F; 2]>,
    pub mass: Vec<[F; 2]>,
}

impl<F: Real> LatticeMasses<F> {
    pub fn new<T: Scalar>(model: &BranchingModel<T>, grid: TimeGrid) -> Result<Self> {
        let n = grid.n_points;
        let mut survival = Vec::with_capacity(n);
        let mut mass = Vec::with_capacity(n);
        let mut prev = [1.0f64; 2];
        for k in 0..n {
            let t = grid.t(k);
            let s = [model.lifetimes[0].tail(t), model.lifetimes[1].tail(t)];
            let d = if k == 0 { [0.0; 2] } else { [prev[0] - s[0], prev[1] - s[1]] };
            if d[1] > MAX_STEP_MASS {
                return Err(Error::GridTooCoarse { step: k, mass: d[1] });
            }
            survival.push([F::c(s[0]), F::c(s[1])]);
            mass.push([F::c(d[0]), F::c(d[1])]);
            prev = s;
        }
        Ok(Self {
            grid,
            survival,
            mass,
        })
    }
}
