use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use levy_rinv::config::{ConfigError, ExperimentConfig};
use levy_rinv::experiments::{self, ExperimentName, CATALOG};
use levy_rinv::output;
use levy_rinv_core::check::CheckKind;

/// Default output directory when neither `--out` nor the config names one.
const OUT_ENV: &str = "LEVY_RINV_OUT";

#[derive(Debug, Parser)]
#[command(version, about = "Run right-inverse experiments on simulated Lévy paths")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the experiments with their anchors.
    List,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory [default: config `out_dir`, then $LEVY_RINV_OUT, then ./out].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = available parallelism).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Run this experiment instead of the one in the config.
    #[arg(long, value_name = "NAME")]
    experiment: Option<String>,
}

fn list() {
    for e in &CATALOG {
        println!("{:<18} {}  [{}]", e.name.as_str(), e.description, e.anchor);
    }
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, String> {
    let path = args.config.as_ref().ok_or("--config is required")?;
    let mut cfg = ExperimentConfig::load(path).map_err(|e| e.to_string())?;
    if let Some(name) = &args.experiment {
        cfg.experiment = name.parse::<ExperimentName>().map_err(|e| e.to_string())?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e: ConfigError| e.to_string())?;
    Ok(cfg)
}

fn run(args: RunArgs) -> ExitCode {
    let cfg = match load(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome = match experiments::run(&cfg, args.workers) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {} failed: {e:#}", cfg.experiment);
            return ExitCode::from(1);
        }
    };
    if let Err(e) = output::write_artifacts(&out_dir, &cfg, &outcome) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    for c in &outcome.checks {
        let op = match c.kind {
            CheckKind::Deviation => "<=",
            CheckKind::PValue => ">",
        };
        println!(
            "{} {} statistic={:.6e} (need {op} {:.3e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.statistic,
            c.tolerance
        );
    }
    println!("{} [{}] -> {}", cfg.experiment, cfg.experiment.entry().anchor, out_dir.display());
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Some(Command::List) => {
            list();
            ExitCode::SUCCESS
        }
        None => run(cli.run),
    }
}
