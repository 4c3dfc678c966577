//! Run configuration: defaults, the `key = value` config file, and the
//! flag/environment overrides layered on top.

use std::path::PathBuf;

use clap::ValueEnum;

/// Output format for every command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Floor on the series-limit guard; smaller values starve every command.
pub const MIN_SERIES_LIMIT: usize = 64;

/// Settings every command runs under, assembled from (weakest first)
/// built-in defaults, the `--config` file, command-line flags, and the
/// FISHBURN_CACHE environment variable.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Cache file for exact xi tables; None disables caching.
    pub cache_path: Option<PathBuf>,
    /// Guard on the number of series coefficients a command may compute.
    pub series_limit: usize,
    /// Worker threads for the parallel commands.
    pub jobs: usize,
    pub output_format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cache_path: None,
            series_limit: fishburn::congruence::DEFAULT_SERIES_LIMIT,
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            output_format: Format::Text,
        }
    }
}

impl RunConfig {
    /// Layer a config file's settings over this one.  Syntax: one
    /// `key = value` per line; `#` starts a comment; blank lines are
    /// ignored.  Keys: cache_path, series_limit, jobs, output_format.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line.split_once('=').ok_or_else(|| {
                format!("config line {lineno}: expected `key = value`, got {line:?}")
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "cache_path" => self.cache_path = Some(PathBuf::from(value)),
                "series_limit" => {
                    self.series_limit = value.parse().map_err(|_| {
                        format!("config line {lineno}: series_limit wants an integer, got {value:?}")
                    })?;
                }
                "jobs" => {
                    self.jobs = value.parse().map_err(|_| {
                        format!("config line {lineno}: jobs wants an integer, got {value:?}")
                    })?;
                }
                "output_format" => {
                    self.output_format = match value {
                        "json" => Format::Json,
                        "csv" => Format::Csv,
                        "text" => Format::Text,
                        other => {
                            return Err(format!(
                                "config line {lineno}: output_format must be json, csv or text, got {other:?}"
                            ))
                        }
                    };
                }
                other => return Err(format!("config line {lineno}: unknown key {other:?}")),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.series_limit < MIN_SERIES_LIMIT {
            return Err(format!(
                "series_limit must be at least {MIN_SERIES_LIMIT}, got {}",
                self.series_limit
            ));
        }
        if self.jobs == 0 {
            return Err("jobs must be positive".to_string());
        }
        Ok(())
    }
}
