//! Experiment runner behind the `kinflow` binary.
//!
//! A TOML config selects a case (contact, shock, sod or custom states) and a
//! regime (free-molecular, DSMC, finite volume or exact Riemann). Each run
//! writes one profile CSV per sample time, a diagnostics CSV and a manifest
//! that records the fully resolved config.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{parse_config, Regime};
use output::{Manifest, ManifestInfo, ProfileEntry};

#[derive(Debug, Parser)]
#[command(
    name = "kinflow",
    version,
    about = "Evolution of 1D flow discontinuities across kinetic regimes"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Experiment config (TOML); a run manifest is accepted too.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory; overrides the config `output`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for DSMC replicas. Never changes results.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form collisionless solution.
    Freemol,
    /// Unsteady DSMC.
    Dsmc,
    /// Finite-volume scheme.
    Fvm,
    /// Exact Euler Riemann solution.
    Riemann,
    /// Recomputes diagnostics.csv from the profiles of an existing run
    /// directory (`--out`, or the directory holding `--config`).
    Diag,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(kinflow::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<kinflow::Error> for CliError {
    /// Errors from the numerics map to exit 2; bad input caught by the
    /// library maps to exit 1.
    fn from(e: kinflow::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read_config(path: &Option<PathBuf>) -> Result<(PathBuf, String), CliError> {
    let path = path
        .clone()
        .ok_or_else(|| CliError::Config("no config given (use --config PATH)".into()))?;
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    Ok((path, text))
}

/// Runs a parsed command line; returns the output directory.
pub fn run_cli(cli: &Cli) -> Result<PathBuf, CliError> {
    let regime = match cli.command {
        Command::Freemol => Regime::Freemol,
        Command::Dsmc => Regime::Dsmc,
        Command::Fvm => Regime::Fvm,
        Command::Riemann => Regime::Riemann,
        Command::Diag => return run_diag(cli),
    };
    let (path, text) = read_config(&cli.global.config)?;
    let mut cfg = parse_config(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Some(seed) = cli.global.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.global.out {
        cfg.output = out.to_string_lossy().into_owned();
    }
    let resolved = cfg.resolve(regime).map_err(|e| CliError::Config(e.to_string()))?;

    let threads = cli.global.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    let start = Instant::now();
    let profiles = pool.install(|| run::run_profiles(&resolved))?;
    let wall = start.elapsed().as_secs_f64();

    let dir = PathBuf::from(&resolved.config.output);
    let plateaus = resolved.plateaus();
    let mut entries = Vec::with_capacity(profiles.len());
    let mut rows = Vec::with_capacity(profiles.len());
    for (k, p) in profiles.iter().enumerate() {
        let name = output::profile_file_name(k);
        output::write_file(&dir, &name, &output::profile_csv(p, &plateaus)).map_err(|e| io_err(&dir, e))?;
        entries.push(ProfileEntry { file: name, t: p.t });
        rows.push(run::diagnostics_row(p, plateaus));
    }
    output::write_file(&dir, output::DIAGNOSTICS, &output::diagnostics_csv(&rows)).map_err(|e| io_err(&dir, e))?;
    let manifest = Manifest {
        manifest: ManifestInfo {
            kinflow_version: env!("CARGO_PKG_VERSION").into(),
            command: regime.name().into(),
            seed: resolved.config.seed,
            threads: pool.current_num_threads(),
            wall_time_s: wall,
            diagnostics: output::DIAGNOSTICS.into(),
            profiles: entries,
        },
        config: resolved.config.clone(),
    };
    output::write_file(&dir, output::MANIFEST, &manifest.to_toml()).map_err(|e| io_err(&dir, e))?;
    Ok(dir)
}

fn run_diag(cli: &Cli) -> Result<PathBuf, CliError> {
    let dir = match (&cli.global.out, &cli.global.config) {
        (Some(d), _) => d.clone(),
        (None, Some(c)) => c.parent().map(Path::to_path_buf).unwrap_or_default(),
        (None, None) => return Err(CliError::Config("diag needs --out DIR".into())),
    };
    let path = dir.join(output::MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let manifest: Manifest = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let regime = match manifest.manifest.command.as_str() {
        "freemol" => Regime::Freemol,
        "dsmc" => Regime::Dsmc,
        "fvm" => Regime::Fvm,
        "riemann" => Regime::Riemann,
        other => return Err(CliError::Config(format!("unknown command `{other}` in manifest"))),
    };
    let resolved = manifest
        .config
        .clone()
        .with_defaults()
        .resolve(regime)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let plateaus = resolved.plateaus();
    let mut rows = Vec::new();
    for entry in &manifest.manifest.profiles {
        let p = dir.join(&entry.file);
        let csv = fs::read_to_string(&p).map_err(|e| io_err(&p, e))?;
        let profile = output::read_profile_csv(&csv, entry.t, resolved.units(), regime.source())
            .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        rows.push(run::diagnostics_row(&profile, plateaus));
    }
    output::write_file(&dir, output::DIAGNOSTICS, &output::diagnostics_csv(&rows)).map_err(|e| io_err(&dir, e))?;
    Ok(dir)
}
