//! `linewave`: line-wave modes of two-part impedance planes from the
//! command line.
//!
//! Exit codes: 0 on success, 2 when some sweep points failed, 1 on any
//! fatal error.

mod config;
mod jobs;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::JobKind;

#[derive(Parser)]
#[command(name = "linewave", version, about = "Line waves on two-part impedance planes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "LINEWAVE_THREADS")]
    threads: Option<usize>,
    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Args)]
struct JobArgs {
    /// JSON job configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for one mode.
    Solve(JobArgs),
    /// Follow a mode along a parameter grid.
    Sweep(JobArgs),
    /// Solve for one mode and tabulate its field on the plane.
    Field(JobArgs),
    /// Surface waves of the uniform half-planes.
    Sw(JobArgs),
    /// Run the quadrature and fixture oracles.
    Selftest {
        /// Also rewrite the golden fixture file from the reference oracles.
        #[arg(long)]
        write_golden: Option<PathBuf>,
    },
    /// Render an SVG from result CSV files.
    Plot {
        #[arg(long, value_enum)]
        kind: PlotKind,
        /// One or more CSV files; dispersion files become separate curves.
        #[arg(long, required = true, num_args = 1..)]
        csv: Vec<PathBuf>,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// x-axis label for dispersion plots.
        #[arg(long, default_value = "param")]
        x_label: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    Dispersion,
    Field,
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    let (kind, args) = match cli.command {
        Command::Solve(a) => (JobKind::Solve, a),
        Command::Sweep(a) => (JobKind::Sweep, a),
        Command::Field(a) => (JobKind::Field, a),
        Command::Sw(a) => (JobKind::Sw, a),
        Command::Selftest { write_golden } => {
            let ok = jobs::selftest(write_golden.as_deref())?;
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Plot { kind, csv, out, x_label } => {
            let svg = match kind {
                PlotKind::Dispersion => {
                    let curves = csv
                        .iter()
                        .map(|p| {
                            let label = p.file_stem().and_then(|s| s.to_str()).unwrap_or("curve").to_string();
                            Ok((label, output::read_dispersion(p)?))
                        })
                        .collect::<anyhow::Result<Vec<_>>>()?;
                    plot::dispersion_svg(&curves, &x_label)?
                }
                PlotKind::Field => {
                    let mut rows = Vec::new();
                    for p in &csv {
                        rows.extend(output::read_field(p)?);
                    }
                    plot::field_svg(&rows, None)?
                }
            };
            std::fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
            return Ok(ExitCode::SUCCESS);
        }
    };
    let cfg = config::load(&args.config, kind)?;
    let outcome = jobs::run(&cfg, &args.out)?;
    Ok(if outcome.partial { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
