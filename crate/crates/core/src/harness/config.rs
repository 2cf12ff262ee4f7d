use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::limits::{HOptions, ThetaOptions, TheoremId};
use crate::model::ModelFile;
use crate::regimes::RatioThresholds;
use crate::sim::DEFAULT_EVENT_BUDGET;

/// Quantity held fixed along a schedule curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveQuantity {
    /// `μ₂(t)/N`
    Mu2OverN,
    /// `R(t)/N`
    ROverN,
    /// `N √((v₂u₂/B)(1 − G₂(t)))`
    FinalScale,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulePoint {
    pub n: u64,
    pub t: f64,
}

/// How the `(N, t)` points of a run are chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    Points { points: Vec<SchedulePoint> },
    /// For each `N`, the `t` with `quantity = ratio`.
    SolveT {
        quantity: CurveQuantity,
        ratio: f64,
        n: Vec<u64>,
    },
    /// At fixed `t`, the `N` (rounded) with `quantity = ratio`, one per ratio.
    SolveN {
        quantity: CurveQuantity,
        ratios: Vec<f64>,
        t: f64,
    },
}

/// One argument of the transform. `s` multiplies in `s^{Z₁}` for T2 and
/// `s^{Z₂}` for Z12; other theorems ignore it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArgPoint {
    #[serde(default)]
    pub lambda1: f64,
    #[serde(default)]
    pub lambda2: f64,
    #[serde(default = "one")]
    pub s: f64,
}

fn one() -> f64 {
    1.0
}

impl ArgPoint {
    pub fn laplace(lambda1: f64, lambda2: f64) -> Self {
        Self {
            lambda1,
            lambda2,
            s: 1.0,
        }
    }

    pub fn pgf(s: f64, lambda2: f64) -> Self {
        Self {
            lambda1: 0.0,
            lambda2,
            s,
        }
    }

    pub const ZERO: ArgPoint = ArgPoint {
        lambda1: 0.0,
        lambda2: 0.0,
        s: 1.0,
    };
}

/// Pass rule: `gap ≤ max(z·stderr, allowance)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    #[serde(default = "default_z")]
    pub z: f64,
    pub allowance: f64,
    /// Increases of the gap tolerated along a sweep.
    #[serde(default = "default_inversions")]
    pub inversions: usize,
}

fn default_z() -> f64 {
    4.0
}

fn default_inversions() -> usize {
    1
}

impl Tolerance {
    pub fn threshold(&self, stderr: f64) -> f64 {
        (self.z * stderr).max(self.allowance)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThetaConfig {
    pub lambda_max: f64,
    pub points: usize,
    pub nodes: usize,
    pub max_residual: f64,
}

impl Default for ThetaConfig {
    fn default() -> Self {
        let d = ThetaOptions::default();
        Self {
            lambda_max: d.lambda_max,
            points: d.lambda_points,
            nodes: d.nodes,
            max_residual: 1e-8,
        }
    }
}

impl ThetaConfig {
    pub fn options(&self) -> ThetaOptions {
        ThetaOptions {
            lambda_max: self.lambda_max,
            lambda_points: self.points,
            nodes: self.nodes,
            ..ThetaOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HConfig {
    pub theta_points: usize,
    pub lambda_points: usize,
    pub nodes: usize,
}

impl Default for HConfig {
    fn default() -> Self {
        let d = HOptions::default();
        Self {
            theta_points: d.theta_points,
            lambda_points: d.lambda_points,
            nodes: d.nodes,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OConfig {
    pub step: f64,
    pub horizon: f64,
}

impl Default for OConfig {
    fn default() -> Self {
        Self {
            step: 0.5,
            horizon: 1e4,
        }
    }
}

/// Cross-check of T1 against `(1 − Q₂(t; s))^N` from the Volterra solver,
/// run for `N ≤ max_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceConfig {
    pub step: f64,
    #[serde(default = "default_coherence_n")]
    pub max_n: u64,
}

fn default_coherence_n() -> u64 {
    1000
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub theta: ThetaConfig,
    pub h: HConfig,
    pub o: OConfig,
    pub coherence: Option<CoherenceConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Model file; relative paths resolve against the config's directory.
    pub model: PathBuf,
    pub theorem: TheoremId,
    /// Expected tail index; checked against the model when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub schedule: Schedule,
    pub args: Vec<ArgPoint>,
    pub replicates: u64,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub event_budget: u64,
    pub tolerance: Tolerance,
    /// Evaluate the gap trend along the schedule.
    #[serde(default)]
    pub sweep: bool,
    /// `ψ(t) = t^{-γ}` for T6.
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub thresholds: RatioThresholds,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_budget() -> u64 {
    DEFAULT_EVENT_BUDGET
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut config: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn model_path(&self) -> PathBuf {
        match &self.base_dir {
            Some(dir) if self.model.is_relative() => dir.join(&self.model),
            _ => self.model.clone(),
        }
    }

    pub fn load_model(&self) -> Result<ModelFile> {
        ModelFile::load(self.model_path())
    }

    pub fn check(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::EmptyRun);
        }
        if self.args.is_empty() {
            return Err(Error::Config("no transform arguments".into()));
        }
        for a in &self.args {
            let ok = a.lambda1 >= 0.0 && a.lambda2 >= 0.0 && (0.0..=1.0).contains(&a.s);
            if !ok {
                return Err(Error::Config(format!(
                    "arguments need lambda >= 0 and s in [0,1], got {a:?}"
                )));
            }
        }
        let t = &self.tolerance;
        if !(t.z >= 0.0 && t.allowance >= 0.0) {
            return Err(Error::Config("tolerance z and allowance must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma must lie in [0,1), got {}", self.gamma)));
        }
        let empty = match &self.schedule {
            Schedule::Points { points } => points.is_empty(),
            Schedule::SolveT { n, .. } => n.is_empty(),
            Schedule::SolveN { ratios, .. } => ratios.is_empty(),
        };
        if empty {
            return Err(Error::Config("empty schedule".into()));
        }
        Ok(())
    }

    /// SHA-256 of the config (as parsed) followed by the model it refers to.
    pub fn hash(&self, model: &ModelFile) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self).expect("config serializes"));
        h.update(model.to_json().as_bytes());
        hex::encode(h.finalize())
    }
}
