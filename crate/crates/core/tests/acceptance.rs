//! Acceptance suite. Each criterion is its own test and writes one
//! `ACn PASS|FAIL` line to stderr, uncaptured.
//!
//! Reference values below are hand-derived for the reference model
//! (β = 1/2 unless noted): Γ = 4/π, μ₁ = 1, μ₂(t) = 2√t − 1 for t ≥ 1,
//! D = [[1/2, 1], [1/2, 1]], u₂ = 1, v₂u₂/B = 4.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use bhlab::harness::{run_experiment, ExperimentConfig, Report};
use bhlab::limits::{
    solve_h, solve_theta, HOptions, QuadraticForm, ThetaMap, ThetaOptions, ThetaStart, UniformAxis,
};
use bhlab::model::gamma_beta;
use bhlab::sim::{run_batch_from, SimConfig, Simulator};
use bhlab::volterra::{
    mean_matrix, renewal_matrix, richardson, solve_generating_system, survival_probability,
    TimeGrid,
};
use bhlab::{ExactModel, Model, Rational64, Vec2};

const EXACT_TOL: f64 = 1e-12;
const RENEWAL_BAND: (f64, f64) = (0.9, 1.1);
const P22_BAND: (f64, f64) = (0.95, 1.05);
const P21_BAND: (f64, f64) = (0.8, 1.2);
const SURVIVAL_BAND: (f64, f64) = (0.8, 1.2);
const ORACLE_Z: f64 = 4.0;
const ORACLE_REPLICATES: u64 = 200_000;
const KAPPA_MAX: f64 = 0.8;
const THETA_RESIDUAL: f64 = 1e-8;
const H_RESIDUAL: f64 = 1e-7;
const START_TOL: f64 = 1e-8;
const FIRST_ITERATE_TOL: f64 = 1e-10;
const SWEEP_Z: f64 = 4.0;
const T1_ALLOWANCE: f64 = 0.03;
const Z12_ALLOWANCE: f64 = 0.05;
const T4_ALLOWANCE: f64 = 0.05;
const DETERMINISM_REPLICATES: u64 = 2_000;

fn verdict(id: &str, pass: bool, detail: &str) {
    let line = format!("{id} {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "{id} failed: {detail}");
}

fn mu2(t: f64) -> f64 {
    2.0 * t.sqrt() - 1.0
}

fn within(x: f64, band: (f64, f64)) -> bool {
    x >= band.0 && x <= band.1
}

fn experiments() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/experiments")
}

fn run_shipped(name: &str) -> Report {
    let cfg = ExperimentConfig::load(experiments().join(name)).unwrap();
    run_experiment(&cfg).unwrap()
}

/// `gaps[i + 1] <= gaps[i]` for every argument.
fn nonincreasing(report: &Report) -> bool {
    report
        .trend
        .iter()
        .all(|t| t.gaps.windows(2).all(|w| w[1] <= w[0]))
}

fn final_rows_pass(report: &Report, allowance: f64) -> (bool, f64) {
    let last = report.points.last().unwrap();
    let mut worst = 0.0f64;
    let ok = last.rows.iter().all(|r| {
        worst = worst.max(r.gap);
        r.gap <= (SWEEP_Z * r.stderr).max(allowance)
    });
    (ok, worst)
}

fn gap_summary(report: &Report) -> String {
    report
        .trend
        .iter()
        .map(|t| {
            let g: Vec<String> = t.gaps.iter().map(|g| format!("{g:.4}")).collect();
            format!(
                "({},{},{})=[{}]",
                t.arg.lambda1,
                t.arg.lambda2,
                t.arg.s,
                g.join(" ")
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn population_stats(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = v.collect();
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, (var / n).sqrt())
}

#[test]
fn ac1_constants() {
    let q = Rational64::new;
    let c = ExactModel::reference(0.5).constants().unwrap();
    let u_ok = c.u.0 == [q(1, 1), q(1, 1)];
    let v_ok = c.v.0 == [q(1, 3), q(2, 3)];
    let b_ok = c.b == q(1, 6);
    let d_expected = [[q(1, 1), q(1, 1)], [q(1, 2), q(1, 2)]];
    let d_ok = c.d.0 == d_expected;
    let gamma = gamma_beta(0.5f64).unwrap();
    let g_ok = (gamma - 4.0 / PI).abs() <= EXACT_TOL;
    verdict(
        "AC1",
        u_ok && v_ok && b_ok && d_ok && g_ok,
        &format!(
            "u={u_ok} v={v_ok} B={b_ok} D={d_ok} (computed [[{}, {}], [{}, {}]], expected [[1, 1], [1/2, 1/2]]) Gamma={g_ok}",
            c.d.0[0][0], c.d.0[0][1], c.d.0[1][0], c.d.0[1][1]
        ),
    );
}

#[test]
fn ac2_renewal_asymptotics() {
    let model = Model::reference(0.5);
    let grid = TimeGrid::with_horizon(0.5, 2e4).unwrap();
    let ren = renewal_matrix::<f64, f64>(&model, grid).unwrap();
    let d = [[0.5, 1.0], [0.5, 1.0]];
    let ratios: Vec<[[f64; 2]; 2]> = [1e3, 1e4, 2e4]
        .iter()
        .map(|&t| {
            let u = ren.u.at(t).unwrap().0;
            let scale = 4.0 / PI * t / mu2(t);
            [
                [u[0][0] / (scale * d[0][0]), u[0][1] / (scale * d[0][1])],
                [u[1][0] / (scale * d[1][0]), u[1][1] / (scale * d[1][1])],
            ]
        })
        .collect();
    let last = ratios[2];
    let in_band = last.iter().flatten().all(|&x| within(x, RENEWAL_BAND));
    let toward_one = (0..4).all(|e| {
        let dist: Vec<f64> = ratios.iter().map(|r| (r[e / 2][e % 2] - 1.0).abs()).collect();
        dist[1] <= dist[0] && dist[2] <= dist[1]
    });
    verdict(
        "AC2",
        in_band && toward_one,
        &format!("U/(Gamma R D) at T=1e3,1e4,2e4: {ratios:.4?} band={in_band} monotone={toward_one}"),
    );
}

#[test]
fn ac3_mean_matrix_law() {
    let model = Model::reference(0.5);
    let t = 1e4;
    let p = |h: f64| mean_matrix::<f64, f64>(&model, TimeGrid::with_horizon(h, t).unwrap()).unwrap();
    let (coarse, fine) = (p(0.5).last().0, p(0.25).last().0);
    let p22 = fine[1][1] / 1.0;
    // μ₁βΓD₂₁ = 1/π
    let p21 = |m: [[f64; 2]; 2]| m[1][0] * (mu2(t) + 1.0) * PI;
    let (r_fine, r_extra) = (p21(fine), richardson(p21(coarse), p21(fine)));
    let ok = within(p22, P22_BAND) && within(r_fine, P21_BAND);
    verdict(
        "AC3",
        ok,
        &format!("h=0.25: P22/D22={p22:.4} P21 ratio={r_fine:.4} (Richardson 0.5/0.25: {r_extra:.4})"),
    );
}

#[test]
fn ac4_simulator_matches_volterra() {
    let model = Model::reference(0.5);
    let sim = Simulator::new(&model);
    let mut lines = Vec::new();
    let mut ok = true;
    for (k, t) in [10.0, 100.0].into_iter().enumerate() {
        for s in [0.0f64, 0.5] {
            let f = |h: f64| {
                let grid = TimeGrid::with_horizon(h, t).unwrap();
                solve_generating_system(&model, Vec2::new(s, s), grid).unwrap()
            };
            let (coarse, fine) = (f(0.02), f(0.01));
            ok &= coarse.clamps == 0 && fine.clamps == 0;
            for (ty, start) in [(0usize, [1u64, 0]), (1, [0, 1])] {
                let seed = 1000 + 10 * k as u64 + ty as u64 + if s > 0.0 { 5 } else { 0 };
                let batch =
                    run_batch_from(&sim, start, &SimConfig::new(1, t, ORACLE_REPLICATES, seed)).unwrap();
                ok &= batch.is_valid();
                let (m, se) =
                    population_stats(batch.usable().map(|x| s.powf(x.z1 as f64) * s.powf(x.z2 as f64)));
                let exact = richardson(coarse.f.last()[ty], fine.f.last()[ty]);
                let pass = (m - exact).abs() <= ORACLE_Z * se;
                ok &= pass;
                lines.push(format!("t={t} s={s} F{}: {m:.5}+-{se:.5} vs {exact:.5}", ty + 1));
            }
        }
    }
    verdict("AC4", ok, &lines.join("; "));
}

#[test]
fn ac5_survival_law() {
    let model = Model::reference(0.5);
    let grid = TimeGrid::with_horizon(0.5, 1e4).unwrap();
    let q = survival_probability::<f64, f64>(&model, grid).unwrap();
    // u₂√(v₂u₂(1 − G₂)/B) = 2 t^{-1/4}
    let ratios: Vec<f64> = [10.0, 100.0, 1e3, 1e4]
        .iter()
        .map(|&t| q.at(t).unwrap()[1] / (2.0 * t.powf(-0.25)))
        .collect();
    let in_band = within(ratios[3], SURVIVAL_BAND);
    let up = ratios.windows(2).all(|w| w[1] >= w[0]);
    let down = ratios.windows(2).all(|w| w[1] <= w[0]);
    verdict(
        "AC5",
        in_band && (up || down),
        &format!("Q2/asymptote at t=10..1e4: {ratios:.4?} band={in_band} monotone={}", up || down),
    );
}

#[test]
fn ac6_fixed_points() {
    let mut lines = Vec::new();
    let mut ok = true;
    for beta in [0.25, 0.5, 0.75, 1.0] {
        let model = Model::reference(beta);
        let c = model.constants().unwrap();
        let qform = QuadraticForm::<f64>::from_model(&model);

        let map = ThetaMap::new(&c, &qform, 256);
        let axis = UniformAxis::new(2.0, 33);
        let first = map.apply(&axis, &vec![map.boundary(); axis.points]);
        // Θ⁽¹⁾(λ) = 1 − Γλ^β/4 in both coordinates.
        let first_err = first
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let e = 1.0 - c.gamma_beta * axis.node(i).powf(beta) / 4.0;
                (v[0] - e).abs().max((v[1] - e).abs())
            })
            .fold(0.0, f64::max);

        let solve = |start| {
            let opts = ThetaOptions {
                start,
                ..ThetaOptions::default()
            };
            solve_theta(&c, &qform, &opts).unwrap()
        };
        let base = solve(ThetaStart::Boundary);
        let start_diff = [ThetaStart::Zero, ThetaStart::Scaled(0.5), ThetaStart::Scaled(1.5)]
            .into_iter()
            .map(|s| {
                let other = solve(s);
                base.values
                    .iter()
                    .zip(&other.values)
                    .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        ok &= base.kappa <= KAPPA_MAX
            && base.residual <= THETA_RESIDUAL
            && start_diff <= START_TOL
            && first_err <= FIRST_ITERATE_TOL;
        let mut line = format!(
            "beta={beta}: theta kappa={:.3} res={:.1e} start={start_diff:.1e} first={first_err:.1e}",
            base.kappa, base.residual
        );
        if beta > 0.5 {
            let opts = HOptions {
                theta_points: 256,
                nodes: 512,
                lambda_points: 5,
                ..HOptions::default()
            };
            let h = solve_h(&c, &qform, &opts).unwrap();
            ok &= h.kappa <= KAPPA_MAX && h.residual <= H_RESIDUAL;
            line += &format!(" H kappa={:.3} res={:.1e}", h.kappa, h.residual);
        }
        lines.push(line);
    }
    verdict("AC6", ok, &lines.join("; "));
}

#[test]
fn ac7_theorem_one_sweep() {
    let report = run_shipped("t1_sweep.json");
    let mut ok = report.zero_check.pass && report.points.iter().all(|p| p.valid());
    // N(1 − G₂(t)) keeps growing along the sweep.
    let n_tail: Vec<f64> = report.points.iter().map(|p| p.regime.diagnostics.n_tail).collect();
    ok &= n_tail.windows(2).all(|w| w[1] > w[0]);
    let ratios: Vec<f64> = report.points.iter().map(|p| p.regime.diagnostics.mu2_over_n).collect();
    ok &= [0.1, 0.03, 0.01]
        .iter()
        .zip(&ratios)
        .all(|(a, b)| (a - b).abs() <= 0.01 * a);
    for (_, r) in report.rows() {
        let oracle = (-r.arg.lambda1 / PI - r.arg.lambda2).exp();
        ok &= (r.predicted - oracle).abs() <= EXACT_TOL;
    }
    ok &= report.trend.len() == 9;
    let trend = nonincreasing(&report);
    let (last, worst) = final_rows_pass(&report, T1_ALLOWANCE);
    verdict(
        "AC7",
        ok && trend && last,
        &format!(
            "N(1-G2)={n_tail:.1?} nonincreasing={trend} final<=max(4se,{T1_ALLOWANCE})={last} worst={worst:.4} harness={} gaps {}",
            report.pass,
            gap_summary(&report)
        ),
    );
}

#[test]
fn ac8_final_stage_sweep() {
    let report = run_shipped("z12_sweep.json");
    let mut ok = report.zero_check.pass && report.points.iter().all(|p| p.valid());
    for p in &report.points {
        ok &= (p.scaling.r - 1.0).abs() <= 1e-9;
    }
    for (_, r) in report.rows() {
        let oracle = (-(1.0 - r.arg.s).sqrt()).exp();
        ok &= (r.predicted - oracle).abs() <= EXACT_TOL;
    }
    ok &= report.trend.len() == 3;
    let trend = nonincreasing(&report);
    let (last, worst) = final_rows_pass(&report, Z12_ALLOWANCE);
    verdict(
        "AC8",
        ok && trend && last,
        &format!(
            "nonincreasing={trend} final<=max(4se,{Z12_ALLOWANCE})={last} worst={worst:.4} harness={} gaps {}",
            report.pass,
            gap_summary(&report)
        ),
    );
}

#[test]
fn ac9_intermediate_sweep() {
    let report = run_shipped("t4_sweep.json");
    let mut ok = report.zero_check.pass && report.points.iter().all(|p| p.valid());
    ok &= report.beta == 0.25;
    for p in &report.points {
        ok &= (p.regime.diagnostics.r_over_n - 1.0).abs() <= 1e-9;
        ok &= p.type1.as_ref().is_some_and(|c| c.pass);
    }
    ok &= report.trend.len() == 3;
    let trend = nonincreasing(&report);
    let (last, worst) = final_rows_pass(&report, T4_ALLOWANCE);
    verdict(
        "AC9",
        ok && trend && last,
        &format!(
            "nonincreasing={trend} final<=max(4se,{T4_ALLOWANCE})={last} worst={worst:.4} harness={} gaps {}",
            report.pass,
            gap_summary(&report)
        ),
    );
}

#[test]
fn ac10_determinism() {
    let mut names: Vec<PathBuf> = std::fs::read_dir(experiments())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    names.sort();
    let mut ok = true;
    let mut lines = Vec::new();
    for path in names {
        let mut cfg = ExperimentConfig::load(&path).unwrap();
        cfg.replicates = cfg.replicates.min(DETERMINISM_REPLICATES);
        let csv = || {
            let mut buf = Vec::new();
            run_experiment(&cfg).unwrap().write_csv(&mut buf).unwrap();
            buf
        };
        let (a, b) = (csv(), csv());
        let same = a == b && !a.is_empty();
        ok &= same;
        lines.push(format!(
            "{}={same}",
            path.file_name().unwrap().to_string_lossy()
        ));
    }
    verdict("AC10", ok, &lines.join(" "));
}
