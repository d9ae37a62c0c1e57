//! Command-line front end. `run` is the whole program minus process exit, so
//! tests can drive it in-process.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Result;
use crate::instance::Registry;
use config::{Overrides, RunConfig};
use report::to_json;

#[derive(Debug, Parser)]
#[command(name = "gcp-lift", version, about = "Truncated lifted spectral triples on generalized crossed products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; defaults to the flat torus.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the report into DIR instead of stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Truncation ladder, e.g. "3x4,4x6,5x8".
    #[arg(long, global = true)]
    pub ladder: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the algebraic tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suite and print a JSON report.
    Check,
    /// Print the lifted spectrum as CSV.
    Spectrum,
    /// Print heat traces as CSV.
    Heat {
        /// Comma-separated times; defaults to `heat.t` from the config.
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Print the norm ladder of a base element as JSON.
    Norm1,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // --help and --version also arrive here
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = execute(&cli, &Registry::default()).and_then(|(target, body, pass)| {
        match target {
            Some(path) => write_file(&path, &body)?,
            None => out.write_all(body.as_bytes())?,
        }
        Ok(pass)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        out: cli.out.clone(),
        ladder: cli.ladder.clone(),
        seed: cli.seed,
        tolerance: cli.tolerance,
    })?;
    Ok(cfg)
}

/// Output path (None for stdout), body and verdict.
fn execute(cli: &Cli, registry: &Registry) -> Result<(Option<PathBuf>, String, bool)> {
    let cfg = load(cli)?;
    Ok(match &cli.command {
        Command::Check => {
            let r = commands::check(&cfg, registry)?;
            ("check.json", to_json(&r), r.all_pass())
        }
        Command::Spectrum => ("spectrum.csv", commands::spectrum(&cfg, registry)?, true),
        Command::Heat { t } => {
            let ts = t.clone().unwrap_or_else(|| cfg.heat.t.clone());
            ("heat.csv", commands::heat(&cfg, registry, &ts)?, true)
        }
        Command::Norm1 => {
            let r = commands::norm1_report(&cfg, registry)?;
            let pass = r.status == "PASS";
            ("norm1.json", to_json(&r), pass)
        }
    })
    .map(|(name, body, pass)| (cfg.output.dir.as_ref().map(|d| d.join(name)), body, pass))
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, body)?;
    Ok(())
}
