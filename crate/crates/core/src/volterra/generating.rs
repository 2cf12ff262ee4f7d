use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::model::BranchingModel;
use crate::scalar::{Real, Scalar};

use super::grid::{GridFunction, TimeGrid};
use super::lattice::LatticeMasses;

/// `F(·; s)` and `Q(·; s) = 1 − F(·; s)` with the number of clamp events
/// beyond rounding.
#[derive(Clone, Debug)]
pub struct GeneratingSolution<F> {
    pub s: Vec2<F>,
    pub f: GridFunction<Vec2<F>>,
    pub q: GridFunction<Vec2<F>>,
    pub clamps: usize,
}

/// `x ↦ 1 − f(1 − x)` evaluated outcome by outcome.
#[derive(Clone, Debug)]
pub(crate) struct ComplementPgf<F> {
    laws: [Vec<(F, u32, u32)>; 2],
}

impl<F: Real> ComplementPgf<F> {
    pub(crate) fn new<T: Scalar>(model: &BranchingModel<T>) -> Self {
        let law = |i: usize| {
            model.offspring[i]
                .outcomes()
                .iter()
                .map(|o| (F::c(o.prob.to_f64_lossy()), o.children[0], o.children[1]))
                .collect()
        };
        Self {
            laws: [law(0), law(1)],
        }
    }

    pub(crate) fn eval(&self, q: [F; 2]) -> [F; 2] {
        let f = [F::one() - q[0], F::one() - q[1]];
        let one = |law: &Vec<(F, u32, u32)>| {
            let pgf = law.iter().fold(F::zero(), |acc, &(p, a, b)| {
                acc + p * f[0].powi(a as i32) * f[1].powi(b as i32)
            });
            F::one() - pgf
        };
        [one(&self.laws[0]), one(&self.laws[1])]
    }
}

/// Solves `F(t_n; s) = s ⊙ (1 − G(t_n)) + Σ_k f(F(t_n − t_k; s)) ⊙ dG(t_k)`.
///
/// Time stepping runs on `Q = 1 − F`, which is the same recursion because the
/// step masses and the survival value add up to one.
pub fn solve_generating_system<T: Scalar, F: Real>(
    model: &BranchingModel<T>,
    s: Vec2<F>,
    grid: TimeGrid,
) -> Result<GeneratingSolution<F>> {
    let masses = LatticeMasses::<F>::new(model, grid)?;
    generating_from_masses(model, s, &masses, grid.n_points)
}

pub(crate) fn generating_from_masses<T: Scalar, F: Real>(
    model: &BranchingModel<T>,
    s: Vec2<F>,
    masses: &LatticeMasses<F>,
    n_points: usize,
) -> Result<GeneratingSolution<F>> {
    for x in s.0 {
        if !(x >= F::zero() && x <= F::one()) {
            return Err(Error::ScalingTooLarge {
                t: 0.0,
                value: x.to_f64_lossy(),
            });
        }
    }
    let phi = ComplementPgf::<F>::new(model);
    let q0 = [F::one() - s[0], F::one() - s[1]];
    let dg = &masses.mass;
    let surv = &masses.survival;
    let mut q: Vec<[F; 2]> = Vec::with_capacity(n_points);
    let mut g: Vec<[F; 2]> = Vec::with_capacity(n_points);
    let mut clamps = 0;
    for step in 0..n_points {
        let mut acc = [q0[0] * surv[step][0], q0[1] * surv[step][1]];
        for k in 1..=step {
            let gk = g[step - k];
            acc[0] = acc[0] + gk[0] * dg[k][0];
            acc[1] = acc[1] + gk[1] * dg[k][1];
        }
        // Overshoot within the rounding bound of the sum is not drift.
        let slack = F::epsilon() * F::c(4.0 * (step + 1) as f64);
        for x in acc.iter_mut() {
            if *x < F::zero() {
                clamps += usize::from(*x < -slack);
                *x = F::zero();
            } else if *x > F::one() {
                clamps += usize::from(*x > F::one() + slack);
                *x = F::one();
            }
        }
        g.push(phi.eval(acc));
        q.push(acc);
    }
    let grid = TimeGrid {
        step: masses.grid.step,
        n_points,
    };
    let q = GridFunction::new(grid, q.into_iter().map(Vec2).collect());
    let f = q.map(|x| Vec2::new(F::one() - x[0], F::one() - x[1]));
    Ok(GeneratingSolution { s, f, q, clamps })
}

/// `Q_i(t) = P_i(Z(t) ≠ 0)`.
pub fn survival_probability<T: Scalar, F: Real>(
    model: &BranchingModel<T>,
    grid: TimeGrid,
) -> Result<GridFunction<Vec2<F>>> {
    Ok(solve_generating_system(model, Vec2::zero(), grid)?.q)
}

/// One point of `𝔔(t) = (v, Q(t; 1 − λuψ(t)))`.
#[derive(Clone, Debug)]
pub struct WeightedPoint<F> {
    pub t: f64,
    pub s: Vec2<F>,
    pub q: Vec2<F>,
    pub value: F,
}

/// Evaluates `𝔔` at the requested times; each point is its own solve at the
/// frozen argument `s = 1 − λuψ(t)`.
pub fn weighted_q<T: Scalar, F: Real>(
    model: &BranchingModel<T>,
    grid: TimeGrid,
    lambda: f64,
    psi: impl Fn(f64) -> f64,
    times: &[f64],
) -> Result<Vec<WeightedPoint<F>>> {
    let constants = model.constants()?.to_f64();
    let masses = LatticeMasses::<F>::new(model, grid)?;
    times
        .iter()
        .map(|&t| {
            let n = grid.index(t)?;
            let shift = constants.u.scale(lambda * psi(t));
            let s = Vec2::new(1.0 - shift[0], 1.0 - shift[1]);
            for x in s.0 {
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::ScalingTooLarge { t, value: x });
                }
            }
            let s = s.map(|&x| F::c(x));
            let sol = generating_from_masses(model, s, &masses, n + 1)?;
            let q = *sol.q.last();
            let v = constants.v.map(|&x| F::c(x));
            Ok(WeightedPoint {
                t,
                s,
                q,
                value: v.dot(&q),
            })
        })
        .collect()
}
