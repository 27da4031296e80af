use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use tamegraph_cli::config::Number;
use tamegraph_cli::{commands, Format, JobConfig, Mode, Report};

/// Analyze countably-Markov piecewise-monotone graph maps.
#[derive(Parser, Debug)]
#[command(name = "tamegraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Job configuration file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Use exact arithmetic.
    #[arg(long, global = true)]
    exact: bool,

    #[arg(long, global = true, value_name = "R")]
    tol: Option<f64>,

    /// Prefix depth of rule families.
    #[arg(long, global = true, value_name = "N")]
    depth: Option<u32>,

    /// Step budget: leo search, entropy steps, series terms or horseshoe length.
    #[arg(long, global = true, value_name = "N")]
    horizon: Option<usize>,

    /// Eigenvalue for subeigenvectors, decimal or `p/q`.
    #[arg(long, global = true, value_name = "R")]
    lambda: Option<String>,

    #[arg(long, global = true, value_name = "ID")]
    base_arc: Option<String>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Validate the map and certify mixing on the transition matrix.
    Analyze,
    /// Gurevich entropy lower bounds.
    Entropy,
    /// Eigenvector or subeigenvector with per-row residuals.
    Eigen,
    /// Piecewise-affine model lengths and slopes.
    SlopeModel,
    /// Loop counts and horseshoe entropy bounds.
    Horseshoe,
}

fn job(cli: &Cli) -> Result<JobConfig> {
    let mut cfg = match &cli.config {
        Some(p) => JobConfig::load(p)?,
        None => anyhow::bail!("--config is required"),
    };
    if cli.exact {
        cfg.mode = Mode::Exact;
    }
    cfg.tol = cli.tol.or(cfg.tol);
    cfg.depth = cli.depth.or(cfg.depth);
    cfg.horizon = cli.horizon.or(cfg.horizon);
    if let Some(l) = &cli.lambda {
        cfg.lambda = Some(Number::Text(l.clone()));
    }
    cfg.base_arc = cli.base_arc.clone().or(cfg.base_arc);
    cfg.format = cli.format.or(cfg.format);
    cfg.out = cli.out.clone().or(cfg.out);
    cfg.check()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Report> {
    let cfg = job(cli)?;
    let report = match cli.command {
        Command::Analyze => commands::analyze(&cfg)?,
        Command::Entropy => commands::entropy(&cfg)?,
        Command::Eigen => commands::eigen(&cfg)?,
        Command::SlopeModel => commands::slope_model(&cfg)?,
        Command::Horseshoe => commands::horseshoe(&cfg)?,
    };
    let text = report.render(cfg.format.unwrap_or_default())?;
    match &cfg.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            for d in &report.diagnostics {
                eprintln!("{d}");
            }
            if let Some(v) = report.get("verdict") {
                eprintln!("{v}");
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
