//! Run configuration: defaults, `QMOD_DEFAULT_TOL`, `key=value` files and
//! command-line overrides, applied in that order.

use std::path::{Path, PathBuf};

use qmod_core::QuadratureSettings;

use crate::verify::ConfigError;

pub const TOL_ENV: &str = "QMOD_DEFAULT_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format, ConfigError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(ConfigError(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub settings: QuadratureSettings,
    /// Overrides every identity's pass tolerance.
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            settings: QuadratureSettings::default(),
            tolerance: None,
            seed: 0,
            samples: None,
            format: Format::Csv,
            output: None,
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    /// Defaults with the environment tolerance applied.
    pub fn from_env() -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Ok(v) = std::env::var(TOL_ENV) {
            let tol: f64 = number(TOL_ENV, &v)?;
            cfg.settings = cfg.settings.with_tolerance(tol);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let s = &mut self.settings;
        match key.trim() {
            "abs_tol" => s.abs_tol = number(key, value)?,
            "rel_tol" => s.rel_tol = number(key, value)?,
            "max_depth" => s.max_depth = number(key, value)?,
            "ray_panel_growth" => s.ray_panel_growth = number(key, value)?,
            "ray_cutoff_magnitude" => s.ray_cutoff_magnitude = number(key, value)?,
            "pv_window" => s.pv_window = number(key, value)?,
            "tolerance" => self.tolerance = Some(number(key, value)?),
            "seed" => self.seed = number(key, value)?,
            "samples" => self.samples = Some(number(key, value)?),
            "format" => self.format = Format::parse(value)?,
            "output" => self.output = Some(PathBuf::from(value.trim())),
            other => return Err(ConfigError(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key=value", n + 1)))?;
            self.set(k, v)?;
        }
        self.validate()
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.settings
            .validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(ConfigError("tolerance must be positive".into()));
            }
        }
        Ok(())
    }
}
