mod config;
mod run;

use ballspace::grid::GridFunction;
use ballspace::harness::CHECKS;
use ballspace::spaces::SPACE_TAGS;
use ballspace::Expr;
use clap::{Parser, Subcommand};
use config::{ConfigError, ExperimentConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

const DEFAULT_CONFIG: &str = include_str!("../../../configs/default_suite.toml");

#[derive(Parser)]
#[command(name = "ballspace", version, about = "Verification harness for maximal, Riesz and wavelet inequalities on ball function spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a config and write reports.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output.dir` and $BALLSPACE_OUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the config with all defaults filled in as effective.toml.
        #[arg(long)]
        dump_effective_config: bool,
    },
    /// List the space tags and their parameters.
    ListSpaces,
    /// List the checks and their parameters.
    ListChecks,
    /// Evaluate the norm of an expression in a configured space.
    NormEval {
        /// Config providing the grid and spaces; the bundled default suite when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        space: String,
        /// Function of `x1`, `x2` and `r`, e.g. `ind(x1, 0, 1)`.
        expr: String,
    },
    /// Print a config with every default filled in.
    DumpEffectiveConfig { config: PathBuf },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write reports: {0}")]
    Write(#[from] std::io::Error),
    #[error("{0}")]
    Eval(#[from] ballspace::Error),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(ConfigError::Parse(_)) => 2,
            CliError::Config(ConfigError::Validation(_)) => 3,
            CliError::Read { .. } => 2,
            CliError::Eval(ballspace::Error::Expression(_)) => 2,
            CliError::Eval(_) => 3,
            CliError::Write(_) | CliError::ChecksFailed { .. } => 1,
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
    Ok(ExperimentConfig::from_toml(&text)?)
}

fn cmd_run(path: &Path, out: Option<&Path>, dump: bool) -> Result<(), CliError> {
    let cfg = load(path)?;
    let dir = run::out_dir(&cfg, out);
    let outcomes = run::run_all(&cfg)?;
    run::write_outputs(&cfg, &dir, &outcomes)?;
    if dump {
        std::fs::write(dir.join("effective.toml"), cfg.to_toml())?;
    }
    for o in &outcomes {
        let status = match &o.report {
            Ok(r) if !r.asserted => "INFO".to_string(),
            Ok(r) if r.passed => "PASS".to_string(),
            Ok(_) => "FAIL".to_string(),
            Err(e) => format!("ERROR {e}"),
        };
        println!("{:<40} {status}", o.name);
    }
    println!("reports written to {}", dir.display());
    let failed = outcomes.iter().filter(|o| !o.ok()).count();
    if failed > 0 {
        return Err(CliError::ChecksFailed { failed, total: outcomes.len() });
    }
    Ok(())
}

fn cmd_norm_eval(config: Option<&Path>, space: &str, expr: &str) -> Result<(), CliError> {
    let cfg = match config {
        Some(p) => load(p)?,
        None => ExperimentConfig::from_toml(DEFAULT_CONFIG)?,
    };
    let grid = cfg.build_grid()?;
    let spec = cfg.space(space)?;
    let f = GridFunction::sample(&Expr::parse(expr)?, grid)?;
    let value = ballspace::spaces::norm(spec, &f)?;
    let spec_json = serde_json::to_string(spec).expect("space spec serializes");
    println!("grid  = {}", serde_json::to_string(&grid.spec()).expect("grid spec serializes"));
    println!("space = {spec_json}");
    println!("f     = {expr}");
    println!("norm  = {value:.12e}");
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out, dump_effective_config } => cmd_run(&config, out.as_deref(), dump_effective_config),
        Command::ListSpaces => {
            for (tag, params) in SPACE_TAGS {
                println!("{tag:<18} {params}");
            }
            Ok(())
        }
        Command::ListChecks => {
            for (tag, params) in CHECKS {
                println!("{tag:<20} {params}");
            }
            Ok(())
        }
        Command::NormEval { config, space, expr } => cmd_norm_eval(config.as_deref(), &space, &expr),
        Command::DumpEffectiveConfig { config } => {
            print!("{}", load(&config)?.to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
