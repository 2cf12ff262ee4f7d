use std::time::Instant;

use crate::error::{Error, Result};
use crate::limits::{
    extend_theta, o_functional, predict_limit, solve_h, solve_theta, HOptions, LimitArgs,
    QuadraticForm, SolvedLimits, TheoremId,
};
use crate::linalg::Vec2;
use crate::model::{BranchingModel, DerivedConstants, ModelFile};
use crate::regimes::{classify_regime, RegimeLabel, RegimeTheorem, Stage};
use crate::sim::{run_batch, SimConfig, Simulator};
use crate::volterra::{richardson, solve_generating_system, TimeGrid};

use super::config::{ArgPoint, ExperimentConfig};
use super::estimate::{empirical_mean, scaling_for, uses_lambda1, uses_s, Scaling};
use super::report::{
    trend, CoherenceRow, PointReport, Report, Row, Runtimes, TrendCheck, Type1Check, ZeroCheck,
    TOLERANCE_NOTE,
};
use super::schedule::resolve_schedule;

/// Loads the config's model file and runs the experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    let file = config.load_model()?;
    run_with_model(config, &file)
}

/// Runs `config` against an already loaded model file.
pub fn run_with_model(config: &ExperimentConfig, file: &ModelFile) -> Result<Report> {
    let started = Instant::now();
    config.check()?;
    let theorem = config.theorem;
    let model = file.model()?.validated()?;
    let c = model.constants()?;
    if let Some(beta) = config.beta {
        if (beta - c.beta).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "config expects beta = {beta}, model has {}",
                c.beta
            )));
        }
    }
    for a in &config.args {
        if a.lambda1 != 0.0 && !uses_lambda1(theorem) {
            return Err(Error::Config(format!("{theorem} has no lambda1 argument")));
        }
        if a.s != 1.0 && !uses_s(theorem) {
            return Err(Error::Config(format!("{theorem} has no pgf argument")));
        }
    }
    let points = resolve_schedule(&c, &config.schedule)?;

    let solve_started = Instant::now();
    let solved = solve_limits(config, &model, &c)?;
    let solve_ms = solve_started.elapsed().as_millis() as u64;

    let sim = Simulator::new(&model);
    let mut reports = Vec::with_capacity(points.len());
    let mut simulate_ms = Vec::with_capacity(points.len());
    let mut coherence = Vec::new();
    let mut zero_check = ZeroCheck {
        empirical: 1.0,
        stderr: 0.0,
        predicted: 1.0,
        pass: true,
    };
    for (i, p) in points.iter().enumerate() {
        let regime = classify_regime(&c, p.n as f64, p.t, config.thresholds);
        let regime_warning = check_regime(theorem, &regime, p.n, p.t)?;
        let scaling = scaling_for(theorem, &c, p.n, p.t, config.gamma)?;
        let seed = config.seed.wrapping_add(i as u64);
        let sim_started = Instant::now();
        let batch = run_batch(
            &sim,
            &SimConfig {
                n: p.n,
                t: p.t,
                replicates: config.replicates,
                seed,
                event_budget: config.event_budget,
            },
        )?;
        simulate_ms.push(sim_started.elapsed().as_millis() as u64);
        let samples = &batch.samples;

        let zero = scaling.estimate(samples, &ArgPoint::ZERO)?;
        let zero_pred = predict(theorem, &c, &scaling, &ArgPoint::ZERO, &solved)?;
        if !(zero.mean == 1.0 && zero.stderr == 0.0 && zero_pred == 1.0) {
            zero_check = ZeroCheck {
                empirical: zero.mean,
                stderr: zero.stderr,
                predicted: zero_pred,
                pass: false,
            };
        }

        let mut rows = Vec::with_capacity(config.args.len());
        for arg in &config.args {
            let est = scaling.estimate(samples, arg)?;
            let predicted = predict(theorem, &c, &scaling, arg, &solved)?;
            let gap = (est.mean - predicted).abs();
            let threshold = config.tolerance.threshold(est.stderr);
            rows.push(Row {
                arg: *arg,
                empirical: est.mean,
                stderr: est.stderr,
                predicted,
                gap,
                threshold,
                pass: gap <= threshold,
            });
        }

        let type1 = if checks_type1(theorem, c.beta) {
            let e = empirical_mean(samples, |s| if s.z1 > 0 { 1.0 } else { 0.0 })?;
            let bound = 5.0 * p.n as f64 / c.mu2(p.t);
            Some(Type1Check {
                fraction: e.mean,
                stderr: e.stderr,
                bound,
                pass: e.mean <= bound,
            })
        } else {
            None
        };

        if let Some(cc) = config.solver.coherence.filter(|cc| theorem == TheoremId::T1 && p.n <= cc.max_n) {
            for arg in &config.args {
                let volterra = volterra_transform(&model, &scaling, arg, p.n, p.t, cc.step)?;
                let est = scaling.estimate(samples, arg)?;
                let gap = (est.mean - volterra).abs();
                coherence.push(CoherenceRow {
                    n: p.n,
                    t: p.t,
                    arg: *arg,
                    volterra,
                    empirical: est.mean,
                    stderr: est.stderr,
                    pass: gap <= 4.0 * est.stderr,
                });
            }
        }

        reports.push(PointReport {
            n: p.n,
            t: p.t,
            regime,
            regime_warning,
            scaling,
            seed,
            usable: zero.count,
            truncated_fraction: batch.truncated_fraction(),
            events: batch.total_events(),
            type1,
            rows,
        });
    }

    let trend_checks: Vec<TrendCheck> = if config.sweep {
        config
            .args
            .iter()
            .enumerate()
            .map(|(j, arg)| {
                let gaps: Vec<f64> = reports.iter().map(|p| p.rows[j].gap).collect();
                let (inversions, pass) = trend(&gaps, config.tolerance.inversions);
                TrendCheck {
                    arg: *arg,
                    gaps,
                    inversions,
                    pass,
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let rows_pass = if config.sweep {
        reports.last().is_some_and(|p| p.rows.iter().all(|r| r.pass))
    } else {
        reports.iter().all(|p| p.rows.iter().all(|r| r.pass))
    };
    let pass = zero_check.pass
        && rows_pass
        && trend_checks.iter().all(|t| t.pass)
        && reports.iter().all(|p| p.valid() && p.type1.as_ref().is_none_or(|t| t.pass))
        && coherence.iter().all(|r| r.pass);

    Ok(Report {
        theorem,
        beta: c.beta,
        config_hash: config.hash(file),
        seed: config.seed,
        replicates: config.replicates,
        tolerance: config.tolerance,
        tolerance_note: TOLERANCE_NOTE.to_string(),
        zero_check,
        points: reports,
        trend: trend_checks,
        coherence,
        pass,
        runtimes: Runtimes {
            solve_ms,
            simulate_ms,
            total_ms: started.elapsed().as_millis() as u64,
        },
    })
}

fn predict(
    theorem: TheoremId,
    c: &DerivedConstants<f64>,
    scaling: &Scaling,
    arg: &ArgPoint,
    solved: &SolvedLimits,
) -> Result<f64> {
    let args = LimitArgs {
        lambda1: arg.lambda1,
        lambda2: arg.lambda2,
        r: scaling.r,
        s: arg.s,
    };
    predict_limit(theorem, c, &args, solved)
}

/// Warning text when `regime` is not the theorem's; error when the process
/// is in the extinction regime but the theorem describes a surviving one.
fn check_regime(theorem: TheoremId, regime: &RegimeLabel, n: u64, t: f64) -> Result<Option<String>> {
    let stage = regime.stage;
    if stage == Stage::Extinction && theorem != TheoremId::Z12 {
        return Err(Error::RegimeMismatch {
            n,
            t,
            found: stage.to_string(),
            expected: theorem.to_string(),
        });
    }
    let matches = match theorem {
        TheoremId::C1 => stage == Stage::Early,
        TheoremId::Z12 => stage >= Stage::Final,
        TheoremId::T6 => stage == Stage::Final,
        _ => regime.theorem == RegimeTheorem::Known(theorem),
    };
    Ok((!matches).then(|| {
        format!(
            "(N={n}, t={t}) is classified {stage}/{}, not {theorem}",
            regime.theorem
        )
    }))
}

/// Theorems whose statement includes the absence of type-1 particles.
fn checks_type1(theorem: TheoremId, beta: f64) -> bool {
    match theorem {
        TheoremId::T3 | TheoremId::T6 => true,
        TheoremId::T4 => beta <= 0.5,
        _ => false,
    }
}

/// `E exp(−λ₁a₁Z₁ − λ₂a₂Z₂)` from `N` independent single-ancestor pgfs,
/// Richardson-extrapolated from steps `h` and `h/2` (with `t/h` integral).
fn volterra_transform(
    model: &BranchingModel<f64>,
    scaling: &Scaling,
    arg: &ArgPoint,
    n: u64,
    t: f64,
    step: f64,
) -> Result<f64> {
    let s = scaling.pgf_argument(arg);
    let steps = (t / step).ceil().max(1.0);
    let grid = TimeGrid::new(t / steps, steps as usize + 1)?;
    let mut q2 = [0.0; 2];
    for (k, g) in [grid, grid.halved()].into_iter().enumerate() {
        let sol = solve_generating_system::<f64, f64>(model, Vec2::new(s[0], s[1]), g)?;
        q2[k] = sol.q.last()[1];
    }
    let q = richardson(q2[0], q2[1]);
    Ok((n as f64 * (-q).ln_1p()).exp())
}

/// Limit objects the theorem's prediction needs at the configured arguments.
fn solve_limits(
    config: &ExperimentConfig,
    model: &BranchingModel<f64>,
    c: &DerivedConstants<f64>,
) -> Result<SolvedLimits> {
    let mut solved = SolvedLimits::default();
    let qform = QuadraticForm::<f64>::from_model(model);
    let beta = c.beta;
    match config.theorem {
        TheoremId::T2 => {
            let o = config.solver.o;
            let mut seen: Vec<f64> = Vec::new();
            for a in &config.args {
                if a.s != 1.0 && !seen.contains(&a.s) {
                    seen.push(a.s);
                    solved.o.push(o_functional(model, o.step, a.s, o.horizon)?);
                }
            }
        }
        TheoremId::T4 => {
            let th = config.solver.theta;
            let need = config
                .args
                .iter()
                .map(|a| a.lambda2.powf(1.0 / beta))
                .fold(0.0, f64::max);
            let opts = th.options();
            let mut theta = solve_theta(c, &qform, &opts)?;
            if need > theta.axis.max {
                theta = extend_theta(&theta, c, &qform, need, &opts, th.max_residual)?;
            }
            solved.theta = Some(theta);
        }
        TheoremId::T5 => {
            let p = 2.0 * beta - 1.0;
            let (mut theta_max, mut lambda_max) = (0.0f64, 0.0f64);
            for a in config.args.iter().filter(|a| a.lambda1 > 0.0) {
                theta_max = theta_max.max(a.lambda1.powf(1.0 / p));
                lambda_max = lambda_max.max(a.lambda2 * a.lambda1.powf(-beta / p));
            }
            if theta_max > 0.0 {
                let h = config.solver.h;
                let opts = HOptions {
                    theta_max,
                    theta_points: h.theta_points,
                    lambda_max: lambda_max.max(1e-12),
                    lambda_points: h.lambda_points,
                    nodes: h.nodes,
                    ..HOptions::default()
                };
                solved.h = Some(solve_h(c, &qform, &opts)?);
            }
        }
        _ => {}
    }
    Ok(solved)
}
