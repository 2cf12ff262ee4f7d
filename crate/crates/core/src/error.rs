use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mean matrix is not critical: Perron root {root} differs from 1")]
    NonCriticalMatrix { root: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("tail index {0} outside the admissible range")]
    BetaOutOfRange(f64),

    #[error("grid too coarse: single-step lifetime mass {mass} at step {step} exceeds 0.5")]
    GridTooCoarse { step: usize, mass: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("scaled argument {value} leaves [0,1] at t = {t}")]
    ScalingTooLarge { t: f64, value: f64 },

    #[error("Picard iteration is not a contraction (kappa = {kappa}) even on [0, {domain}]")]
    ContractionFailed { kappa: f64, domain: f64 },

    #[error("argument {arg} outside the solved domain [0, {max}]")]
    OutsideDomain { arg: f64, max: f64 },

    #[error("tail of the O-functional integral did not converge: {0}")]
    TailNotConverged(String),

    #[error("prediction for {0} requires a solved limit object that was not supplied")]
    MissingSolution(&'static str),

    #[error("no usable samples")]
    EmptyRun,

    #[error("regime mismatch: (N={n}, t={t}) is classified {found} but the theorem needs {expected}")]
    RegimeMismatch {
        n: u64,
        t: f64,
        found: String,
        expected: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
