use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::limits::TheoremId;
use crate::regimes::RegimeLabel;
use crate::volterra::csv_err;

use super::config::{ArgPoint, Tolerance};
use super::estimate::Scaling;

/// Comparison at one transform argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub arg: ArgPoint,
    pub empirical: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub gap: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// `P(Z₁(t) > 0)` against `5N/μ₂(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Type1Check {
    pub fraction: f64,
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Simulated T1 transform against `(1 − Q₂(t; s))^N` from the Volterra solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceRow {
    pub n: u64,
    pub t: f64,
    pub arg: ArgPoint,
    pub volterra: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub n: u64,
    pub t: f64,
    pub regime: RegimeLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime_warning: Option<String>,
    pub scaling: Scaling,
    pub seed: u64,
    pub usable: u64,
    pub truncated_fraction: f64,
    pub events: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type1: Option<Type1Check>,
    pub rows: Vec<Row>,
}

impl PointReport {
    pub fn valid(&self) -> bool {
        self.truncated_fraction <= 0.01
    }
}

/// Gap sequence of one argument along a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendCheck {
    pub arg: ArgPoint,
    pub gaps: Vec<f64>,
    /// Number of steps where the gap grew.
    pub inversions: usize,
    pub pass: bool,
}

/// Counts increases of `gaps`; the trend holds with at most `allowed` of
/// them and a last gap no larger than the first.
pub fn trend(gaps: &[f64], allowed: usize) -> (usize, bool) {
    let inversions = gaps.windows(2).filter(|w| w[1] > w[0]).count();
    let ends = match (gaps.first(), gaps.last()) {
        (Some(a), Some(b)) => b <= a,
        _ => true,
    };
    (inversions, inversions <= allowed && ends)
}

/// The λ = 0 identities every run asserts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCheck {
    pub empirical: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Runtimes {
    pub solve_ms: u64,
    pub simulate_ms: Vec<u64>,
    pub total_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub theorem: TheoremId,
    pub beta: f64,
    pub config_hash: String,
    pub seed: u64,
    pub replicates: u64,
    pub tolerance: Tolerance,
    pub tolerance_note: String,
    pub zero_check: ZeroCheck,
    pub points: Vec<PointReport>,
    pub trend: Vec<TrendCheck>,
    pub coherence: Vec<CoherenceRow>,
    pub pass: bool,
    /// Wall-clock timings; the only part of a report that varies between runs.
    pub runtimes: Runtimes,
}

pub const TOLERANCE_NOTE: &str = "the limit theorems give no convergence rates; \
the bias allowance and the sweep trend rule are surrogates for them";

const CSV_HEADER: [&str; 13] = [
    "theorem", "beta", "N", "t", "lambda1", "lambda2", "empirical", "stderr", "predicted", "gap",
    "pass", "s", "config_hash",
];

impl Report {
    /// The report without timings; equal for equal `(model, config, seed)`.
    pub fn content(&self) -> Report {
        Report {
            runtimes: Runtimes::default(),
            ..self.clone()
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = (&PointReport, &Row)> {
        self.points.iter().flat_map(|p| p.rows.iter().map(move |r| (p, r)))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for (p, r) in self.rows() {
            w.write_record([
                self.theorem.to_string(),
                self.beta.to_string(),
                p.n.to_string(),
                p.t.to_string(),
                r.arg.lambda1.to_string(),
                r.arg.lambda2.to_string(),
                r.empirical.to_string(),
                r.stderr.to_string(),
                r.predicted.to_string(),
                r.gap.to_string(),
                r.pass.to_string(),
                r.arg.s.to_string(),
                self.config_hash.clone(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `report.csv` and `report.json` into `dir`.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        self.write_csv(std::fs::File::create(dir.join("report.csv"))?)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        Ok(())
    }
}
