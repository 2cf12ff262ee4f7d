use std::path::{Path, PathBuf};

use bhlab::harness::{
    resolve_schedule, run_experiment, run_with_model, CurveQuantity, ExperimentConfig, Schedule,
};
use bhlab::limits::TheoremId;
use bhlab::{Error, ModelFile};
use serde_json::json;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn model_path(name: &str) -> String {
    root().join("models").join(name).display().to_string()
}

fn config(value: serde_json::Value) -> ExperimentConfig {
    ExperimentConfig::parse(&value.to_string()).unwrap()
}

fn small_t1() -> ExperimentConfig {
    config(json!({
        "model": model_path("reference_beta05.json"),
        "theorem": "T1",
        "schedule": { "kind": "points", "points": [ { "n": 100, "t": 30.25 }, { "n": 300, "t": 240.25 } ] },
        "args": [ { "lambda1": 1, "lambda2": 1 }, { "lambda1": 0.5, "lambda2": 2 } ],
        "replicates": 1500,
        "seed": 12,
        "tolerance": { "z": 4, "allowance": 0.05 },
        "sweep": true,
        "solver": { "coherence": { "step": 0.25 } }
    }))
}

#[test]
fn same_config_gives_identical_reports() {
    let cfg = small_t1();
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.content(), b.content());
    let (mut csv_a, mut csv_b) = (Vec::new(), Vec::new());
    a.write_csv(&mut csv_a).unwrap();
    b.write_csv(&mut csv_b).unwrap();
    assert_eq!(csv_a, csv_b);
    let header = String::from_utf8(csv_a).unwrap();
    assert!(header.starts_with(
        "theorem,beta,N,t,lambda1,lambda2,empirical,stderr,predicted,gap,pass"
    ));
    assert_eq!(header.lines().count(), 1 + 2 * 2);

    let mut reseeded = cfg.clone();
    reseeded.seed += 1;
    let c = run_experiment(&reseeded).unwrap();
    assert_ne!(c.config_hash, a.config_hash);
    assert_ne!(c.points[0].rows[0].empirical, a.points[0].rows[0].empirical);
}

#[test]
fn t1_report_contents() {
    let report = run_experiment(&small_t1()).unwrap();
    assert!(report.zero_check.pass);
    assert_eq!(report.points.len(), 2);
    assert_eq!(report.trend.len(), 2);
    assert_eq!(report.coherence.len(), 4);
    for row in &report.coherence {
        assert!(row.pass, "{row:?}");
    }
    let p = &report.points[1];
    assert_eq!(p.scaling.a1, 30.0 / 300.0);
    assert_eq!(p.scaling.a2, 1.0 / 300.0);
    assert_eq!(p.usable, 1500);
    assert_eq!(p.seed, 13);
    for (_, r) in report.rows() {
        assert_eq!(r.gap, (r.empirical - r.predicted).abs());
        assert_eq!(r.pass, r.gap <= (4.0 * r.stderr).max(0.05));
    }
    assert!(report.pass, "{}", report.to_json());
    let dir = tempfile::tempdir().unwrap();
    report.write_to_dir(dir.path()).unwrap();
    let back: bhlab::harness::Report =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn config_errors() {
    let mut cfg = small_t1();
    cfg.replicates = 0;
    assert!(matches!(run_experiment(&cfg), Err(Error::EmptyRun)));

    let mut cfg = small_t1();
    cfg.theorem = TheoremId::C1;
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));

    let mut cfg = small_t1();
    cfg.args[0].s = 0.5;
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));

    let mut cfg = small_t1();
    cfg.args[0].lambda2 = -1.0;
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));

    let mut cfg = small_t1();
    cfg.beta = Some(0.25);
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));

    let mut cfg = small_t1();
    cfg.model = PathBuf::from("/nonexistent/model.json");
    assert!(matches!(run_experiment(&cfg), Err(Error::Io(_))));
}

#[test]
fn extinction_regime_is_a_mismatch() {
    let mut cfg = small_t1();
    cfg.schedule = Schedule::Points {
        points: vec![bhlab::harness::SchedulePoint { n: 1, t: 1e8 }],
    };
    assert!(matches!(run_experiment(&cfg), Err(Error::RegimeMismatch { .. })));
    // Off-regime points only warn.
    let report = run_experiment(&small_t1()).unwrap();
    assert!(report.points[1].regime_warning.is_some());
}

#[test]
fn shipped_configs_parse_and_resolve() {
    let dir = root().join("experiments");
    let mut names = Vec::new();
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap();
        cfg.check().unwrap();
        let file = cfg.load_model().unwrap();
        let c = file.model().unwrap().constants().unwrap();
        let points = resolve_schedule(&c, &cfg.schedule).unwrap();
        assert!(!points.is_empty());
        names.push((path.file_name().unwrap().to_string_lossy().into_owned(), points));
    }
    let t1 = &names.iter().find(|(n, _)| n == "t1_sweep.json").unwrap().1;
    assert_eq!(t1.iter().map(|p| p.n).collect::<Vec<_>>(), [300, 1000, 3000]);
    let z12 = &names.iter().find(|(n, _)| n == "z12_sweep.json").unwrap().1;
    for (p, n) in z12.iter().zip([4.0f64, 8.0, 16.0]) {
        assert!((p.t / (16.0 * n.powi(4)) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn hash_covers_model_and_config() {
    let cfg = small_t1();
    let file = cfg.load_model().unwrap();
    let h = cfg.hash(&file);
    assert_eq!(h.len(), 64);
    assert_eq!(h, cfg.hash(&file));
    let other = ModelFile::load(model_path("reference_beta025.json")).unwrap();
    assert_ne!(h, cfg.hash(&other));
    let mut tol = cfg.clone();
    tol.tolerance.allowance = 0.01;
    assert_ne!(h, tol.hash(&file));
}

#[test]
fn early_stage_type_two_law() {
    let cfg = config(json!({
        "model": model_path("reference_beta075.json"),
        "theorem": "C1",
        "beta": 0.75,
        "schedule": { "kind": "points", "points": [ { "n": 1000, "t": 100 } ] },
        "args": [ { "lambda2": 0.5 }, { "lambda2": 1 }, { "lambda2": 2 } ],
        "replicates": 2000,
        "seed": 3,
        "tolerance": { "allowance": 0.03 }
    }));
    let report = run_experiment(&cfg).unwrap();
    assert!(report.pass, "{}", report.to_json());
    assert_eq!(report.points[0].regime.stage, bhlab::regimes::Stage::Early);
}

#[test]
fn early_stage_with_type_one_pgf() {
    // β = 1/4, μ₂(t)/N = 1, R(t)/N small.
    let cfg = config(json!({
        "model": model_path("reference_beta025.json"),
        "theorem": "T2",
        "schedule": { "kind": "solve_n", "quantity": "mu2_over_n", "ratios": [1.0], "t": 1e4 },
        "args": [ { "s": 0, "lambda2": 1 }, { "s": 0.5, "lambda2": 0.5 } ],
        "replicates": 2000,
        "seed": 5,
        "tolerance": { "allowance": 0.05 },
        "solver": { "o": { "step": 0.5, "horizon": 1e4 } }
    }));
    let report = run_experiment(&cfg).unwrap();
    assert!(report.pass, "{}", report.to_json());
    let p = &report.points[0];
    assert!((p.scaling.r - 1.0).abs() < 1e-3);
}

/// At desk-scale N this point sits in the intermediate stage, so only the
/// mechanics are checked here, not agreement with the limit.
#[test]
fn psi_scaling_for_final_stage_law() {
    // ψ(t) = t^{-1/4}; r = 2N t^{-3/8} = 1 at t = (2N)^{8/3}.
    let n = 20u64;
    let t = (2.0 * n as f64).powf(8.0 / 3.0);
    let cfg = config(json!({
        "model": model_path("reference_beta05.json"),
        "theorem": "T6",
        "schedule": { "kind": "points", "points": [ { "n": n, "t": t } ] },
        "args": [ { "lambda2": 0.25 }, { "lambda2": 1 }, { "lambda2": 4 } ],
        "replicates": 2000,
        "seed": 9,
        "gamma": 0.25,
        "tolerance": { "allowance": 0.05 }
    }));
    let report = run_experiment(&cfg).unwrap();
    let p = &report.points[0];
    assert!((p.scaling.r - 1.0).abs() < 1e-9);
    assert!((p.scaling.a2 - t.powf(-0.25)).abs() < 1e-15);
    assert!(p.regime_warning.is_some());
    let type1 = p.type1.as_ref().unwrap();
    assert!(type1.pass && type1.bound < 1.0, "{type1:?}");
    let mut last = 1.0;
    for r in &p.rows {
        assert!((r.predicted - (-r.arg.lambda2.sqrt()).exp()).abs() < 1e-12);
        assert!(r.empirical < last && r.empirical > r.predicted - 4.0 * r.stderr);
        last = r.empirical;
    }
}

#[test]
fn intermediate_stage_large_beta() {
    let cfg = config(json!({
        "model": model_path("reference_beta075.json"),
        "theorem": "T5",
        "schedule": { "kind": "solve_t", "quantity": "r_over_n", "ratio": 1.0, "n": [100] },
        "args": [ { "lambda1": 1, "lambda2": 1 }, { "lambda1": 0.5, "lambda2": 0.5 } ],
        "replicates": 1000,
        "seed": 21,
        "tolerance": { "allowance": 0.1 },
        "solver": { "h": { "theta_points": 256, "nodes": 512, "lambda_points": 11 } }
    }));
    let report = run_experiment(&cfg).unwrap();
    let p = &report.points[0];
    assert!((p.scaling.r - 1.0).abs() < 1e-9);
    for (_, r) in report.rows() {
        assert!(r.predicted > 0.0 && r.predicted < 1.0);
    }
    assert!(report.pass, "{}", report.to_json());
}

#[test]
fn curve_schedules() {
    let cfg = small_t1();
    let c = cfg.load_model().unwrap().model().unwrap().constants().unwrap();
    let s = Schedule::SolveT {
        quantity: CurveQuantity::Mu2OverN,
        ratio: 0.1,
        n: vec![100, 300],
    };
    let pts = resolve_schedule(&c, &s).unwrap();
    assert!((pts[0].t - 30.25).abs() < 1e-9 && (pts[1].t - 240.25).abs() < 1e-9);
    let _ = run_with_model(&cfg, &cfg.load_model().unwrap()).unwrap();
}
