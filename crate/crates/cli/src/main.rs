//! `qsv` — bounds, strategies, protocol trials, and scaling sweeps for
//! two-qubit state verification with local measurements.
//!
//! Angles are degrees at the CLI boundary and radians internally. All
//! simulation output is deterministic given the config (including the seed);
//! CSV floats are printed with 17 significant digits.

mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use qsv_core::jones::{check_table, TableCheckReport};
use qsv_core::linalg::Matrix;
use qsv_core::simulator::{run_scaling, run_trial, Mode, ScalingSummary, SimError, StepBound, TrialConfig, TrialRecord};
use qsv_core::statistics::{n_global, n_global_real, n_local, n_local_real};
use qsv_core::strategy::Strategy;

use config::{ModeSpec, RunConfigFile, StrategyChoice};
use error::AppError;

#[derive(Parser)]
#[command(name = "qsv", version, about = "Two-qubit state verification with local measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample-complexity table for given (epsilon, delta, theta).
    Bounds {
        /// Infidelity bound, in (0, 1)
        #[arg(long)]
        epsilon: f64,
        /// Failure probability, in (0, 1)
        #[arg(long)]
        delta: f64,
        /// Target-state angle in degrees, in [0, 90]
        #[arg(long)]
        theta: f64,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyChoice,
    },
    /// Strategy inspection: settings, weights, f, Ω spectrum, self-check
    /// residuals, as JSON on stdout.
    Strategy {
        /// Target-state angle in degrees
        #[arg(long)]
        theta: f64,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyChoice,
        /// Include the wave-plate consistency report
        #[arg(long)]
        check_table: bool,
    },
    /// Run verification trials from a JSON config; writes one CSV per trial.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Multi-trial ε-scaling sweep at fixed δ; writes one summary CSV.
    Scaling {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Bounds { epsilon, delta, theta, strategy } => cmd_bounds(epsilon, delta, theta, strategy),
        Command::Strategy { theta, strategy, check_table } => cmd_strategy(theta, strategy, check_table),
        Command::Simulate { config, seed } => cmd_simulate(&config, seed),
        Command::Scaling { config, seed } => cmd_scaling(&config, seed),
    }
}

fn check_unit(value: f64, flag: &str) -> Result<(), AppError> {
    if value.is_finite() && value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(AppError::invalid(format!("--{flag} must be in (0, 1), got {value}")))
    }
}

fn build_strategy(theta_degrees: f64, choice: StrategyChoice) -> Result<Strategy, AppError> {
    if !theta_degrees.is_finite() || !(0.0..=90.0).contains(&theta_degrees) {
        return Err(AppError::invalid(format!(
            "--theta must be in [0, 90] degrees, got {theta_degrees}"
        )));
    }
    Ok(Strategy::of_kind(choice.into(), theta_degrees.to_radians())?)
}

/// 17 significant digits, locale-independent.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_bounds(epsilon: f64, delta: f64, theta: f64, choice: StrategyChoice) -> Result<(), AppError> {
    check_unit(epsilon, "epsilon")?;
    check_unit(delta, "delta")?;
    let strategy = build_strategy(theta, choice)?;
    let f = strategy.f();

    let ng_real = n_global_real(epsilon, delta).map_err(|e| AppError::invalid(e.to_string()))?;
    let ng = n_global(epsilon, delta).map_err(|e| AppError::invalid(e.to_string()))?;
    let nl_real = n_local_real(epsilon, delta, f).map_err(|e| AppError::invalid(e.to_string()))?;
    let nl = n_local(epsilon, delta, f).map_err(|e| AppError::invalid(e.to_string()))?;

    println!("theta_degrees  {theta}");
    println!("settings       {}", strategy.settings().len());
    println!("f              {}", fmt(f));
    println!("penalty        {}", fmt(1.0 / f));
    println!("n_global       {ng}  (real {})", fmt(ng_real));
    println!("n_local        {nl}  (real {})", fmt(nl_real));
    Ok(())
}

fn matrix_json(m: &Matrix) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect();
    json!(rows)
}

fn table_report_json(report: &TableCheckReport) -> serde_json::Value {
    json!({
        "convention": report.convention,
        "entries": report.entries.iter().map(|e| json!({
            "label": e.label,
            "deviation": e.deviation,
            "flagged": e.flagged,
            "realized": matrix_json(&e.realized),
            "intended": matrix_json(&e.intended),
            "alternates": e.alternates.iter().map(|(name, dev)| json!({
                "name": name,
                "deviation": dev,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn cmd_strategy(theta: f64, choice: StrategyChoice, with_table: bool) -> Result<(), AppError> {
    let strategy = build_strategy(theta, choice)?;
    let eigenvalues = strategy
        .omega()
        .hermitian_eigenvalues()
        .map_err(|e| AppError::invalid(e.to_string()))?;
    let check = strategy.self_check();

    let mut doc = json!({
        "theta_degrees": theta,
        "f": strategy.f(),
        "penalty": 1.0 / strategy.f(),
        "settings": strategy.settings().iter().map(|s| json!({
            "label": s.label(),
            "weight": s.weight(),
            "projector": matrix_json(s.projector()),
        })).collect::<Vec<_>>(),
        "omega_eigenvalues": eigenvalues,
        "self_check": {
            "weight_sum_residual": check.weight_sum_residual,
            "target_residual": check.target_residual,
            "second_eigenvalue_residual": check.second_eigenvalue_residual,
            "idempotency_residual": check.idempotency_residual,
        },
    });
    if with_table {
        let report = check_table(&strategy)?;
        doc["table_check"] = table_report_json(&report);
    }
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    Ok(())
}

fn from_sim(e: SimError) -> AppError {
    AppError::invalid(e.to_string())
}

fn trial_csv(strategy: &Strategy, record: &TrialRecord) -> String {
    let mut out = String::from("step,setting,outcome,m,bound,inconclusive\n");
    for s in &record.steps {
        let label = strategy.settings()[s.setting].label();
        let outcome = if s.accepted { "accept" } else { "reject" };
        let (bound, inconclusive) = match s.bound {
            StepBound::Delta(v) | StepBound::Epsilon(v) => (fmt(v), 0),
            StepBound::Inconclusive => (String::new(), 1),
        };
        out.push_str(&format!("{},{label},{outcome},{},{bound},{inconclusive}\n", s.step, s.accepts));
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), AppError> {
    std::fs::write(path, contents)
        .map_err(|e| AppError::io(format!("cannot write {}: {e}", path.display())))
}

/// Output path for trial `index`: unchanged for a single trial, otherwise
/// `stem_t<index>.ext`.
fn trial_path(base: &Path, trials: u64, index: u64) -> PathBuf {
    if trials == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    let ext = base
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}_t{index}{ext}"))
}

fn cmd_simulate(config_path: &Path, seed_override: Option<u64>) -> Result<(), AppError> {
    let cfg = RunConfigFile::load(config_path)?;
    if cfg.trials == 0 {
        return Err(AppError::invalid("trials must be >= 1"));
    }
    let base = config_path.parent().unwrap_or(Path::new("."));
    let strategy = Strategy::of_kind(cfg.strategy.into(), cfg.theta_radians())?;
    let source = cfg.source_model(base)?;
    let seed = seed_override.unwrap_or(cfg.seed);
    let mode: Mode = cfg.mode.into();

    let out_base = PathBuf::from(&cfg.output_path);
    for trial_index in 0..cfg.trials {
        let record = run_trial(&TrialConfig {
            strategy: &strategy,
            source: &source,
            n_max: cfg.n_max,
            mode,
            seed,
            trial_index,
        })
        .map_err(from_sim)?;
        let path = trial_path(&out_base, cfg.trials, trial_index);
        write_file(&path, &trial_csv(&strategy, &record))?;
    }
    Ok(())
}

fn scaling_csv(summary: &ScalingSummary) -> String {
    let mut out = String::from("n,epsilon_mean,epsilon_stddev,inconclusive_count\n");
    for p in &summary.points {
        let mean = p.epsilon_mean.map(fmt).unwrap_or_default();
        out.push_str(&format!("{},{mean},{},{}\n", p.n, fmt(p.epsilon_stddev), p.inconclusive));
    }
    out.push_str(&format!("# slope={} intercept={}\n", fmt(summary.slope), fmt(summary.intercept)));
    out
}

fn cmd_scaling(config_path: &Path, seed_override: Option<u64>) -> Result<(), AppError> {
    let cfg = RunConfigFile::load(config_path)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let delta = match cfg.mode {
        ModeSpec::FixedDelta(d) => d,
        ModeSpec::FixedEpsilon(_) => {
            return Err(AppError::invalid("scaling requires mode fixed_delta"));
        }
    };
    let n_min = cfg
        .n_min
        .ok_or_else(|| AppError::invalid("scaling requires n_min"))?;
    let strategy = Strategy::of_kind(cfg.strategy.into(), cfg.theta_radians())?;
    let source = cfg.source_model(base)?;
    let seed = seed_override.unwrap_or(cfg.seed);

    let summary = run_scaling(&strategy, &source, cfg.trials, n_min, cfg.n_max, delta, seed)
        .map_err(from_sim)?;
    write_file(Path::new(&cfg.output_path), &scaling_csv(&summary))
}
