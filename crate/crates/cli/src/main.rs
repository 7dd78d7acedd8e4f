//! `zigzag` — models for the zigzag-cavity torsion sensor.
//!
//! Exit codes: 0 success, 1 validation failure, 2 configuration error,
//! 3 domain error (a request outside a closed form's validity).

// validation guards are written `!(x > 0.0)` so NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{cmd_modes, cmd_noise, cmd_range, cmd_sweep, cmd_validate, Format};

#[derive(Parser)]
#[command(
    name = "zigzag",
    version,
    about = "Zigzag optical-cavity torsion sensor: mode geometry, pose sweeps, noise budget, \
             sensing range, and the cross-validation suite"
)]
struct Cli {
    /// Sectioned key=value configuration file; defaults cover the
    /// demonstration cavity. Any key can be overridden through
    /// `ZIGZAG_<SECTION>__<key>` environment variables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format; overrides the `[output]` section.
    #[arg(long, global = true, value_enum)]
    format: Option<CliFormat>,

    /// Seed for the randomized validation poses.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Cavity mode geometry: beam separation, lengths, waist, FSRs,
    /// linewidths, transverse-mode spacing.
    Modes,
    /// Frequency-shift sweep over one pendulum degree of freedom, with a
    /// fitted slope/curvature summary.
    Sweep,
    /// Full noise budget on a frequency grid, all sources in torque, angle
    /// and cavity-frequency representations.
    Noise,
    /// Mode-overlap efficiency curve and the yaw sensing range.
    Range,
    /// Cross-validation suite; exits 1 if any check fails.
    Validate,
}

fn run() -> Result<(String, bool), (String, i32)> {
    let cli = Cli::parse();

    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| (format!("config error: cannot read {}: {e}", path.display()), 2))?,
        None => String::new(),
    };
    let run_config = config::parse(&text).map_err(|e| (e.to_string(), 2))?;

    let format = match cli.format {
        Some(CliFormat::Csv) => Format::Csv,
        Some(CliFormat::Json) => Format::Json,
        None => match run_config.output_format.as_deref() {
            Some("json") => Format::Json,
            _ => Format::Csv,
        },
    };

    let (body, ok) = match cli.command {
        Command::Modes => (cmd_modes(&run_config, format).map_err(|e| (e.message, e.exit_code))?, true),
        Command::Sweep => (cmd_sweep(&run_config, format).map_err(|e| (e.message, e.exit_code))?, true),
        Command::Noise => (cmd_noise(&run_config, format).map_err(|e| (e.message, e.exit_code))?, true),
        Command::Range => (cmd_range(&run_config, format).map_err(|e| (e.message, e.exit_code))?, true),
        Command::Validate => cmd_validate(&run_config, format, cli.seed),
    };

    let out_path = cli.out.clone().or_else(|| run_config.output_path.clone().map(PathBuf::from));
    match out_path {
        Some(path) => std::fs::write(&path, &body)
            .map_err(|e| (format!("cannot write {}: {e}", path.display()), 2))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| (format!("cannot write output: {e}"), 2))?;
        }
    }
    Ok((String::new(), ok))
}

fn main() -> ExitCode {
    match run() {
        Ok((_, true)) => ExitCode::SUCCESS,
        Ok((_, false)) => ExitCode::from(1),
        Err((message, code)) => {
            eprintln!("{message}");
            ExitCode::from(code as u8)
        }
    }
}
