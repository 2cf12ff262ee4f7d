use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bhlab::harness::{run_experiment, ExperimentConfig};
use bhlab::limits::{
    o_functional, solve_h, solve_theta, HOptions, QuadraticForm, ThetaOptions, ThetaSolution,
};
use bhlab::model::validate_model;
use bhlab::regimes::{regime_map, write_regime_csv, RatioThresholds};
use bhlab::volterra::{solve_generating_system, TimeGrid};
use bhlab::{Error, Mat2, ModelFile, Vec2};
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "bhlab", version, about = "Two-type critical Bellman-Harris process laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model file checks.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Print M, u, v, B, D, beta and Gamma_beta as JSON.
    Constants { file: PathBuf },
    /// Solve the generating-function system for one ancestor of each type.
    Volterra {
        file: PathBuf,
        #[arg(long)]
        horizon: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = 0.0)]
        s1: f64,
        #[arg(long, default_value_t = 0.0)]
        s2: f64,
        /// CSV output (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit objects of the theorems.
    Limits {
        #[command(subcommand)]
        action: LimitsAction,
    },
    /// Regime classification.
    Regimes {
        #[command(subcommand)]
        action: RegimesAction,
    },
    /// Monte Carlo experiments.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
}

#[derive(Subcommand)]
enum ModelAction {
    /// Validate a model file; exits 1 when a check fails.
    Check { file: PathBuf },
}

#[derive(Subcommand)]
enum LimitsAction {
    /// Theta on [0, Lambda].
    Theta {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Omega(lambda) = lambda Theta(lambda^(1/beta)).
    Omega {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// H(theta, lambda) for 1/2 < beta <= 1.
    H {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        theta_max: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 11)]
        lambda_points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// O(s) for beta < 1/2.
    Ofun {
        file: PathBuf,
        #[arg(long, num_args = 1.., default_values_t = [0.0, 0.5])]
        s: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = 1e4)]
        horizon: f64,
    },
}

#[derive(Subcommand)]
enum RegimesAction {
    /// Classify a logarithmic (N, t) lattice.
    Map {
        file: PathBuf,
        #[arg(long)]
        nmin: f64,
        #[arg(long)]
        nmax: f64,
        #[arg(long)]
        tmin: f64,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 25)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExperimentAction {
    /// Run a config; writes report.csv and report.json, exits 2 on failure.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

enum Failure {
    Validation(String),
    Acceptance(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Io(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Acceptance(msg)) => {
            eprintln!("FAIL: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(file: &Path) -> Result<ModelFile, Failure> {
    ModelFile::load(file).map_err(|e| match e {
        Error::Io(e) => Failure::Io(format!("{}: {e}", file.display())),
        e => Failure::Validation(format!("{}: {e}", file.display())),
    })
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Model {
            action: ModelAction::Check { file },
        } => {
            let model = load(&file)?.model()?;
            let report = validate_model(&model);
            println!("{report}");
            if !report.passed() {
                return Err(Failure::Validation(report.failures().join("; ")));
            }
            Ok(())
        }
        Command::Constants { file } => constants(&file),
        Command::Volterra {
            file,
            horizon,
            step,
            s1,
            s2,
            out,
        } => {
            let model = load(&file)?.model()?.validated()?;
            let grid = TimeGrid::with_horizon(step, horizon)?;
            let sol = solve_generating_system::<f64, f64>(&model, Vec2::new(s1, s2), grid)?;
            if sol.clamps > 0 {
                eprintln!("note: {} values clamped to [0,1]", sol.clamps);
            }
            sol.f.write_vector_csv(output(&out)?, ["F1", "F2"])?;
            Ok(())
        }
        Command::Limits { action } => limits(action),
        Command::Regimes {
            action:
                RegimesAction::Map {
                    file,
                    nmin,
                    nmax,
                    tmin,
                    tmax,
                    points,
                    out,
                },
        } => {
            let c = load(&file)?.model()?.validated()?.constants()?;
            let ok = |a: f64, b: f64| a > 0.0 && b >= a;
            if !ok(nmin, nmax) || !ok(tmin, tmax) {
                return Err(Failure::Validation("need 0 < min <= max for N and t".into()));
            }
            let cells = regime_map(&c, (nmin, nmax), (tmin, tmax), points, RatioThresholds::default());
            write_regime_csv(&cells, output(&out)?)?;
            Ok(())
        }
        Command::Experiment {
            action: ExperimentAction::Run { config, out_dir },
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = run_experiment(&cfg)?;
            report.write_to_dir(&out_dir)?;
            for (p, r) in report.rows() {
                println!(
                    "N={} t={} lambda=({}, {}) s={}: empirical {:.5} +/- {:.5}, predicted {:.5}, gap {:.5} [{}]",
                    p.n,
                    p.t,
                    r.arg.lambda1,
                    r.arg.lambda2,
                    r.arg.s,
                    r.empirical,
                    r.stderr,
                    r.predicted,
                    r.gap,
                    if r.pass { "pass" } else { "fail" }
                );
            }
            for p in &report.points {
                if let Some(w) = &p.regime_warning {
                    eprintln!("warning: {w}");
                }
            }
            if report.pass {
                println!("experiment passed ({})", report.config_hash);
                Ok(())
            } else {
                Err(Failure::Acceptance(format!(
                    "experiment failed, see {}",
                    out_dir.join("report.json").display()
                )))
            }
        }
    }
}

fn constants(file: &Path) -> CliResult {
    let spec = load(file)?;
    let exact = spec.exact_model()?.validated()?;
    let c = exact.constants()?;
    let mat = |m: &Mat2<bhlab::Rational64>| -> Vec<Vec<String>> {
        m.0.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect()
    };
    let vec = |v: &Vec2<bhlab::Rational64>| -> Vec<String> { v.0.iter().map(|x| x.to_string()).collect() };
    let value = json!({
        "M": mat(&c.m),
        "u": vec(&c.u),
        "v": vec(&c.v),
        "B": c.b.to_string(),
        "D": mat(&c.d),
        "beta": c.beta,
        "gamma_beta": c.gamma_beta,
        "mu1": c.mu1,
    });
    println!("{}", serde_json::to_string_pretty(&value).expect("json"));
    Ok(())
}

fn write_theta(sol: &ThetaSolution<f64>, out: &Option<PathBuf>) -> io::Result<()> {
    let mut w = output(out)?;
    writeln!(w, "lambda,theta1,theta2")?;
    for (i, v) in sol.values.iter().enumerate() {
        writeln!(w, "{},{:e},{:e}", sol.axis.node(i), v[0], v[1])?;
    }
    Ok(())
}

fn limits(action: LimitsAction) -> CliResult {
    match action {
        LimitsAction::Theta {
            file,
            lambda_max,
            points,
            out,
        } => {
            let model = load(&file)?.model()?.validated()?;
            let c = model.constants()?;
            let opts = ThetaOptions {
                lambda_max,
                lambda_points: points,
                ..ThetaOptions::default()
            };
            let sol = solve_theta(&c, &QuadraticForm::<f64>::from_model(&model), &opts)?;
            eprintln!(
                "Lambda = {}, kappa = {:.4}, iterations = {}, residual = {:.2e}",
                sol.axis.max,
                sol.kappa,
                sol.trace.iterations(),
                sol.residual
            );
            write_theta(&sol, &out)?;
            Ok(())
        }
        LimitsAction::Omega {
            file,
            lambda_max,
            points,
            out,
        } => {
            let model = load(&file)?.model()?.validated()?;
            let c = model.constants()?;
            let opts = ThetaOptions {
                lambda_max: lambda_max.powf(1.0 / c.beta),
                ..ThetaOptions::default()
            };
            let sol = solve_theta(&c, &QuadraticForm::<f64>::from_model(&model), &opts)?;
            let top = sol.omega_max().min(lambda_max);
            let mut w = output(&out)?;
            writeln!(w, "lambda,omega1,omega2")?;
            let steps = points.max(2) - 1;
            for i in 0..=steps {
                let lambda = top * i as f64 / steps as f64;
                let o = sol.omega(lambda)?;
                writeln!(w, "{lambda},{:e},{:e}", o[0], o[1])?;
            }
            Ok(())
        }
        LimitsAction::H {
            file,
            theta_max,
            lambda_max,
            lambda_points,
            out,
        } => {
            let model = load(&file)?.model()?.validated()?;
            let c = model.constants()?;
            let opts = HOptions {
                theta_max,
                lambda_max,
                lambda_points,
                ..HOptions::default()
            };
            let sol = solve_h(&c, &QuadraticForm::<f64>::from_model(&model), &opts)?;
            eprintln!(
                "theta_max = {}, kappa = {:.4}, residual = {:.2e}",
                sol.theta_axis.max, sol.kappa, sol.residual
            );
            let mut w = output(&out)?;
            writeln!(w, "theta,lambda,h1,h2")?;
            for (j, col) in sol.columns.iter().enumerate() {
                let lambda = sol.lambda_axis.node(j);
                for (i, v) in col.iter().enumerate() {
                    writeln!(w, "{},{lambda},{:e},{:e}", sol.theta_axis.node(i), v[0], v[1])?;
                }
            }
            Ok(())
        }
        LimitsAction::Ofun {
            file,
            s,
            step,
            horizon,
        } => {
            let model = load(&file)?.model()?.validated()?;
            println!("s,o1,o2,tail1,tail2");
            for s in s {
                let o = o_functional(&model, step, s, horizon)?;
                println!("{s},{:e},{:e},{:e},{:e}", o.value[0], o.value[1], o.tail[0], o.tail[1]);
            }
            Ok(())
        }
    }
}
