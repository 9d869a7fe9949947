//! Run configuration with the precedence flags > config file > defaults.
//!
//! The config file is flat `key = value` text; `#` starts a comment. The
//! `TRACEDOWN_CONFIG` environment variable names a fallback config file
//! used when `--config` is absent.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;

/// Command-line overrides shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Loss rate amplitude of the oscillating-rate family (1/time)
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Angular frequency of the rate oscillation (rad/time)
    #[arg(long)]
    pub omega: Option<f64>,

    /// Depolarization rate (1/time)
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Constant attenuation rate for horizontal polarization (1/time)
    #[arg(long = "gamma-h")]
    pub gamma_h: Option<f64>,

    /// Constant attenuation rate for vertical polarization (1/time)
    #[arg(long = "gamma-v")]
    pub gamma_v: Option<f64>,

    /// End of the sampled time window
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,

    /// Number of grid points (>= 2)
    #[arg(long)]
    pub steps: Option<usize>,

    /// Gate tolerance for the subcommand's checks
    #[arg(long)]
    pub tol: Option<f64>,

    /// Write the CSV to this path instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Config file (key = value lines); TRACEDOWN_CONFIG is the fallback
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Effective configuration after merging flags, config file and defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub gamma: f64,
    pub omega: f64,
    pub lambda: f64,
    pub gamma_h: f64,
    pub gamma_v: f64,
    pub t_max: f64,
    pub steps: usize,
    pub tol: f64,
    pub out: Option<PathBuf>,
}

/// Per-subcommand defaults.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub gamma: f64,
    pub omega: f64,
    pub lambda: f64,
    pub gamma_h: f64,
    pub gamma_v: f64,
    pub t_max: f64,
    pub steps: usize,
    pub tol: f64,
}

fn parse_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(
                "{}:{}: expected `key = value`, got `{raw}`",
                path.display(),
                lineno + 1
            );
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn file_value<T: std::str::FromStr>(file: &HashMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match file.get(key) {
        None => Ok(None),
        Some(raw) => match raw.parse::<T>() {
            Ok(v) => Ok(Some(v)),
            Err(e) => bail!("config key `{key}`: cannot parse `{raw}`: {e}"),
        },
    }
}

impl RunConfig {
    /// Resolves the effective configuration for one subcommand.
    pub fn resolve(args: &ConfigArgs, defaults: Defaults) -> Result<Self> {
        let config_path = args
            .config
            .clone()
            .or_else(|| std::env::var_os("TRACEDOWN_CONFIG").map(PathBuf::from));
        let file = match &config_path {
            Some(path) => parse_config_file(path)?,
            None => HashMap::new(),
        };

        let config = Self {
            gamma: args
                .gamma
                .or(file_value(&file, "gamma")?)
                .unwrap_or(defaults.gamma),
            omega: args
                .omega
                .or(file_value(&file, "omega")?)
                .unwrap_or(defaults.omega),
            lambda: args
                .lambda
                .or(file_value(&file, "lambda")?)
                .unwrap_or(defaults.lambda),
            gamma_h: args
                .gamma_h
                .or(file_value(&file, "gamma_h")?)
                .unwrap_or(defaults.gamma_h),
            gamma_v: args
                .gamma_v
                .or(file_value(&file, "gamma_v")?)
                .unwrap_or(defaults.gamma_v),
            t_max: args
                .t_max
                .or(file_value(&file, "t_max")?)
                .unwrap_or(defaults.t_max),
            steps: args
                .steps
                .or(file_value(&file, "steps")?)
                .unwrap_or(defaults.steps),
            tol: args
                .tol
                .or(file_value(&file, "tol")?)
                .unwrap_or(defaults.tol),
            out: args
                .out
                .clone()
                .or_else(|| file.get("out").map(PathBuf::from)),
        };

        if config.gamma < 0.0 || config.gamma_h < 0.0 || config.gamma_v < 0.0 {
            bail!("rates must be nonnegative");
        }
        if config.omega <= 0.0 {
            bail!("omega must be positive");
        }
        if config.lambda < 0.0 {
            bail!("lambda must be nonnegative");
        }
        if config.t_max <= 0.0 {
            bail!("t_max must be positive");
        }
        if config.steps < 2 {
            bail!("steps must be at least 2");
        }
        if config.tol <= 0.0 {
            bail!("tol must be positive");
        }
        Ok(config)
    }

    /// Key/value pairs echoed into the CSV header.
    pub fn header_entries(&self) -> Vec<(String, String)> {
        vec![
            ("gamma".into(), crate::output::fmt_sig(self.gamma)),
            ("omega".into(), crate::output::fmt_sig(self.omega)),
            ("lambda".into(), crate::output::fmt_sig(self.lambda)),
            ("gamma_h".into(), crate::output::fmt_sig(self.gamma_h)),
            ("gamma_v".into(), crate::output::fmt_sig(self.gamma_v)),
            ("t_max".into(), crate::output::fmt_sig(self.t_max)),
            ("steps".into(), self.steps.to_string()),
            ("tol".into(), crate::output::fmt_sig(self.tol)),
        ]
    }
}
