use crate::error::Result;
use crate::linalg::Mat2;
use crate::model::BranchingModel;
use crate::scalar::{Real, Scalar};

use super::grid::{GridFunction, TimeGrid};
use super::lattice::LatticeMasses;

/// `U` and `U_I = U ∗ G_I` on a common grid.
#[derive(Clone, Debug)]
pub struct RenewalSolution<F> {
    pub u: GridFunction<Mat2<F>>,
    pub u_i: GridFunction<Mat2<F>>,
}

type M2<F> = [[F; 2]; 2];

/// Solves `U(t_n) = I + Σ_k dM(t_k) U(t_n − t_k)` with `dM_k = diag(dG_k) M`,
/// and `U_I(t_n) = Σ_k U(t_n − t_k) diag(dG_k)`.
pub fn renewal_matrix<T: Scalar, F: Real>(
    model: &BranchingModel<T>,
    grid: TimeGrid,
) -> Result<RenewalSolution<F>> {
    let masses = LatticeMasses::<F>::new(model, grid)?;
    Ok(renewal_from_masses(model, &masses))
}

pub(crate) fn renewal_from_masses<T: Scalar, F: Real>(
    model: &BranchingModel<T>,
    masses: &LatticeMasses<F>,
) -> RenewalSolution<F> {
    let n = masses.grid.n_points;
    let m = model.mean_matrix().map(|x| F::c(x.to_f64_lossy())).0;
    let dg = &masses.mass;
    let zero = F::zero();
    let mut u: Vec<M2<F>> = Vec::with_capacity(n);
    let mut w: Vec<M2<F>> = Vec::with_capacity(n);
    for step in 0..n {
        let mut acc = [[F::one(), zero], [zero, F::one()]];
        for k in 1..=step {
            let g = dg[k];
            let wk = &w[step - k];
            for i in 0..2 {
                acc[i][0] = acc[i][0] + g[i] * wk[i][0];
                acc[i][1] = acc[i][1] + g[i] * wk[i][1];
            }
        }
        w.push(mat_mul(&m, &acc));
        u.push(acc);
    }
    let mut u_i: Vec<M2<F>> = Vec::with_capacity(n);
    for step in 0..n {
        let mut acc = [[zero; 2]; 2];
        for k in 1..=step {
            let g = dg[k];
            let uk = &u[step - k];
            for i in 0..2 {
                acc[i][0] = acc[i][0] + uk[i][0] * g[0];
                acc[i][1] = acc[i][1] + uk[i][1] * g[1];
            }
        }
        u_i.push(acc);
    }
    let grid = masses.grid;
    let u = wrap_increments(grid, u);
    let u_i = wrap_increments(grid, u_i);
    RenewalSolution { u, u_i }
}

fn mat_mul<F: Real>(a: &M2<F>, b: &M2<F>) -> M2<F> {
    let mut c = [[F::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn wrap_increments<F: Real>(grid: TimeGrid, values: Vec<M2<F>>) -> GridFunction<Mat2<F>> {
    let values: Vec<Mat2<F>> = values.into_iter().map(Mat2).collect();
    let increments = (0..values.len())
        .map(|k| {
            if k == 0 {
                values[0]
            } else {
                values[k] - values[k - 1]
            }
        })
        .collect();
    GridFunction {
        grid,
        values,
        increments: Some(increments),
    }
}

/// `P(t_n) = Σ_k ΔU_k diag(1 − G(t_n − t_k))`, with `ΔU_0 = U(0) = I`.
pub fn mean_matrix<T: Scalar, F: Real>(
    model: &BranchingModel<T>,
    grid: TimeGrid,
) -> Result<GridFunction<Mat2<F>>> {
    let masses = LatticeMasses::<F>::new(model, grid)?;
    let renewal = renewal_from_masses(model, &masses);
    Ok(mean_from_renewal(&renewal, &masses))
}

pub fn mean_from_renewal<F: Real>(
    renewal: &RenewalSolution<F>,
    masses: &LatticeMasses<F>,
) -> GridFunction<Mat2<F>> {
    let du = renewal.u.increments.as_ref().expect("renewal carries increments");
    let s = &masses.survival;
    let n = masses.grid.n_points;
    let values = (0..n)
        .map(|step| {
            let mut acc = [[F::zero(); 2]; 2];
            for k in 0..=step {
                let d = du[k].0;
                let sv = s[step - k];
                for i in 0..2 {
                    acc[i][0] = acc[i][0] + d[i][0] * sv[0];
                    acc[i][1] = acc[i][1] + d[i][1] * sv[1];
                }
            }
            Mat2(acc)
        })
        .collect();
    GridFunction::new(masses.grid, values)
}

/// `∫_0^{t_n} (1 − G₂(t_n − w)) dU(w)`.
pub fn key_renewal<F: Real>(
    renewal: &RenewalSolution<F>,
    masses: &LatticeMasses<F>,
    step: usize,
) -> Mat2<F> {
    let du = renewal.u.increments.as_ref().expect("renewal carries increments");
    let s = &masses.survival;
    (0..=step).fold(Mat2::zero(), |acc, k| acc + du[k].scale(s[step - k][1]))
}
