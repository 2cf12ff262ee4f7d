//! End-to-end experiments: simulate, estimate the scaled transforms, compare
//! with the predicted limits and report.

mod config;
mod estimate;
mod report;
mod run;
mod schedule;

pub use config::{
    ArgPoint, CoherenceConfig, CurveQuantity, ExperimentConfig, HConfig, OConfig, Schedule,
    SchedulePoint, SolverConfig, ThetaConfig, Tolerance,
};
pub use estimate::{
    empirical_laplace, empirical_mean, psi, scaling_for, uses_lambda1, uses_s, Estimate, PgfOn,
    Scaling,
};
pub use report::{
    trend, CoherenceRow, PointReport, Report, Row, Runtimes, TrendCheck, Type1Check, ZeroCheck,
};
pub use run::{run_experiment, run_with_model};
pub use schedule::{curve_value, resolve_schedule, solve_n, solve_t};
