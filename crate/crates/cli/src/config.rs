//! Run configuration: defaults, optional JSON file, environment overrides,
//! then command-line flags, in increasing precedence. The effective
//! configuration is echoed into every report for reproducibility.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Precision {
    /// Absolute target for L evaluations.
    pub l_target: f64,
    /// Absolute target per quadrature segment.
    pub quad_target: f64,
    /// Absolute target for path traces.
    pub trace_target: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Self {
            l_target: 1e-11,
            quad_target: 1e-9,
            trace_target: 1e-11,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            t_min: 2.0,
            t_max: 80.0,
            step: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub precision: Precision,
    pub zero_cache: PathBuf,
    pub grid: Grid,
    pub format: String,
    pub seed: u64,
    pub version: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            precision: Precision::default(),
            zero_cache: PathBuf::from("zero-cache"),
            grid: Grid::default(),
            format: "json".into(),
            seed: 1,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

impl RunConfig {
    /// Defaults <- config file <- environment <- flags.
    pub fn assemble(
        file: Option<&Path>,
        zero_cache_flag: Option<PathBuf>,
        seed_flag: Option<u64>,
        format_flag: Option<String>,
    ) -> Result<Self, String> {
        let mut cfg = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                serde_json::from_str::<RunConfig>(&text).map_err(|e| format!("{e}"))?
            }
            None => RunConfig::default(),
        };
        cfg.version = env!("CARGO_PKG_VERSION").into();
        if let Ok(dir) = std::env::var("SARG_ZERO_CACHE") {
            cfg.zero_cache = PathBuf::from(dir);
        }
        if let Ok(seed) = std::env::var("SARG_SEED") {
            cfg.seed = seed
                .parse()
                .map_err(|_| format!("SARG_SEED must be an integer, got '{seed}'"))?;
        }
        if let Some(dir) = zero_cache_flag {
            cfg.zero_cache = dir;
        }
        if let Some(seed) = seed_flag {
            cfg.seed = seed;
        }
        if let Some(fmt) = format_flag {
            cfg.format = fmt;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if !(self.precision.l_target > 0.0) {
            return Err("precision.l_target must be positive".into());
        }
        if !(self.precision.quad_target > 0.0) {
            return Err("precision.quad_target must be positive".into());
        }
        if !(self.precision.trace_target > 0.0) {
            return Err("precision.trace_target must be positive".into());
        }
        if !(self.grid.step > 0.0) {
            return Err("grid.step must be positive".into());
        }
        if self.grid.t_max < self.grid.t_min {
            return Err("grid.t_max must be >= grid.t_min".into());
        }
        if self.format != "csv" && self.format != "json" {
            return Err(format!("format must be csv or json, got '{}'", self.format));
        }
        Ok(())
    }
}
