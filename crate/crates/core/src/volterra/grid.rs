use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::scalar::Real;

/// Uniform grid `t_n = n·h`, `n = 0..n_points`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeGrid {
    pub step: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(step: f64, n_points: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if n_points == 0 {
            return Err(Error::InvalidGrid("grid needs at least one point".into()));
        }
        Ok(Self { step, n_points })
    }

    /// Smallest grid with this step reaching `horizon`.
    pub fn with_horizon(step: f64, horizon: f64) -> Result<Self> {
        if !(horizon >= 0.0) {
            return Err(Error::InvalidGrid(format!("negative horizon {horizon}")));
        }
        let n = (horizon / step - 1e-9).ceil().max(0.0) as usize;
        Self::new(step, n + 1)
    }

    pub fn horizon(&self) -> f64 {
        self.step * (self.n_points - 1) as f64
    }

    pub fn t(&self, n: usize) -> f64 {
        self.step * n as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |n| self.t(n))
    }

    /// Index of the grid point nearest to `t`.
    pub fn index(&self, t: f64) -> Result<usize> {
        let n = (t / self.step).round();
        if !(n >= 0.0 && (n as usize) < self.n_points) {
            return Err(Error::InvalidGrid(format!(
                "time {t} outside [0, {}]",
                self.horizon()
            )));
        }
        Ok(n as usize)
    }

    pub fn halved(&self) -> Self {
        Self {
            step: 0.5 * self.step,
            n_points: 2 * self.n_points - 1,
        }
    }
}

/// Values sampled on a [`TimeGrid`], with optional per-step increments.
#[derive(Clone, Debug)]
pub struct GridFunction<V> {
    pub grid: TimeGrid,
    pub values: Vec<V>,
    pub increments: Option<Vec<V>>,
}

impl<V: Clone> GridFunction<V> {
    pub fn new(grid: TimeGrid, values: Vec<V>) -> Self {
        debug_assert_eq!(grid.n_points, values.len());
        Self {
            grid,
            values,
            increments: None,
        }
    }

    pub fn at(&self, t: f64) -> Result<V> {
        Ok(self.values[self.grid.index(t)?].clone())
    }

    pub fn last(&self) -> &V {
        self.values.last().expect("grid is nonempty")
    }

    pub fn map<U>(&self, f: impl Fn(&V) -> U) -> GridFunction<U> {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(&f).collect(),
            increments: self.increments.as_ref().map(|inc| inc.iter().map(&f).collect()),
        }
    }

    /// Writes `t` and the given columns, one row per grid point.
    pub fn write_csv<W: Write>(
        &self,
        out: W,
        columns: &[&str],
        row: impl Fn(&V) -> Vec<f64>,
    ) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t"];
        header.extend_from_slice(columns);
        w.write_record(&header).map_err(csv_err)?;
        for (n, v) in self.values.iter().enumerate() {
            let mut rec = vec![format!("{}", self.grid.t(n))];
            rec.extend(row(v).into_iter().map(|x| format!("{x:e}")));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

impl<F: Real> GridFunction<Mat2<F>> {
    pub fn write_matrix_csv<W: Write>(&self, out: W) -> Result<()> {
        self.write_csv(out, &["m11", "m12", "m21", "m22"], |m| {
            m.entries().iter().map(|x| x.to_f64_lossy()).collect()
        })
    }
}

impl<F: Real> GridFunction<Vec2<F>> {
    pub fn write_vector_csv<W: Write>(&self, out: W, names: [&str; 2]) -> Result<()> {
        self.write_csv(out, &names, |v| vec![v[0].to_f64_lossy(), v[1].to_f64_lossy()])
    }
}

/// First-order Richardson extrapolation `2·fine − coarse`.
pub fn richardson<F: Real>(coarse: F, fine: F) -> F {
    fine + fine - coarse
}
