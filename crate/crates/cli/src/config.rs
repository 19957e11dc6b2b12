//! Run configuration: TOML file values overridden by command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// TOML file with defaults for the flags below
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Field characteristic: 0 or a prime
    #[arg(long = "char", global = true)]
    pub characteristic: Option<u64>,
    /// Top homotopy degree to certify
    #[arg(short = 'T', long = "top", global = true)]
    pub truncation: Option<usize>,
    /// Weight bound
    #[arg(short = 'W', long = "weight", global = true)]
    pub weight: Option<usize>,
    /// Bar-length bound
    #[arg(short = 'N', long = "bar", global = true)]
    pub bar: Option<usize>,
    /// Series truncation order
    #[arg(short = 'M', long = "series-order", global = true)]
    pub series_truncation: Option<usize>,
    /// Output format
    #[arg(long, value_enum, global = true)]
    pub output: Option<Format>,
    /// Seed for randomized checks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "char")]
    characteristic: Option<u64>,
    truncation: Option<usize>,
    weight: Option<usize>,
    bar: Option<usize>,
    series_truncation: Option<usize>,
    output: Option<Format>,
    seed: Option<u64>,
}

/// Resolved settings. Bounds left unset fall back to per-command defaults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub characteristic: u64,
    pub truncation: Option<usize>,
    pub weight: Option<usize>,
    pub bar: Option<usize>,
    pub series_truncation: usize,
    pub output: Format,
    pub seed: u64,
}

pub const DEFAULT_SERIES_TRUNCATION: usize = 8;

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let cfg = RunConfig {
            characteristic: args.characteristic.or(file.characteristic).unwrap_or(0),
            truncation: args.truncation.or(file.truncation),
            weight: args.weight.or(file.weight),
            bar: args.bar.or(file.bar),
            series_truncation: args.series_truncation.or(file.series_truncation).unwrap_or(DEFAULT_SERIES_TRUNCATION),
            output: args.output.or(file.output).unwrap_or(Format::Json),
            seed: args.seed.or(file.seed).unwrap_or(0),
        };
        for (name, v) in [("truncation", cfg.truncation), ("weight", cfg.weight), ("bar", cfg.bar)] {
            if v == Some(0) {
                bail!("{name} must be positive");
            }
        }
        if cfg.series_truncation == 0 {
            bail!("series_truncation must be positive");
        }
        Ok(cfg)
    }
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
