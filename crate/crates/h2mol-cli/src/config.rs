//! Optional JSON configuration file mirroring the command-line flags.
//!
//! Every physics flag has a same-named key here (kebab-case flags map to
//! snake_case keys). Explicit command-line flags win over config values.
//! The file is schema-versioned and unknown keys are rejected, so a typo
//! fails loudly instead of being silently ignored.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{CliError, CliResult};

/// Parsed configuration file; all values optional, flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must be 1 when the file is present.
    pub schema_version: Option<u32>,
    #[serde(alias = "R")]
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_from: Option<f64>,
    pub gamma_to: Option<f64>,
    pub steps: Option<usize>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub plane: Option<String>,
    pub n: Option<usize>,
    pub t_max: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub hermitian: Option<bool>,
    pub frozen_geometry: Option<bool>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub no_cache: Option<bool>,
}

impl RunConfig {
    /// Loads and validates a config file; no path yields the empty config.
    pub fn load(path: Option<&Path>) -> CliResult<RunConfig> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        match cfg.schema_version {
            Some(1) => Ok(cfg),
            Some(v) => Err(CliError::Input(format!(
                "config {}: unsupported schema_version {v} (expected 1)",
                path.display()
            ))),
            None => Err(CliError::Input(format!(
                "config {}: missing schema_version",
                path.display()
            ))),
        }
    }
}

/// Required parameter: explicit flag, else config value, else an error
/// naming the missing flag.
pub fn require<T>(flag: Option<T>, cfg: Option<T>, name: &str) -> CliResult<T> {
    flag.or(cfg)
        .ok_or_else(|| CliError::Input(format!("missing required parameter --{name}")))
}

/// Optional parameter with a default: flag wins, then config, then default.
pub fn pick<T>(flag: Option<T>, cfg: Option<T>, default: T) -> T {
    flag.or(cfg).unwrap_or(default)
}

/// Boolean switch: the flag can only assert, so either source asserting
/// turns the switch on.
pub fn pick_flag(flag: bool, cfg: Option<bool>) -> bool {
    flag || cfg.unwrap_or(false)
}
