use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use shear_spectrum::dispersion::{DEFAULT_N_MAX, DEFAULT_TOL};
use shear_spectrum::FlowParams;

pub const THREADS_ENV: &str = "SHEAR_SPECTRUM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KGrid {
    Linear { start: f64, stop: f64, count: usize },
    List(Vec<f64>),
}

impl KGrid {
    /// Inclusive, evenly spaced when linear.
    pub fn values(&self) -> Vec<f64> {
        match self {
            KGrid::List(ks) => ks.clone(),
            KGrid::Linear { start, count: 1, .. } => vec![*start],
            KGrid::Linear { start, stop, count } => {
                let step = (stop - start) / (*count - 1) as f64;
                (0..*count).map(|i| start + step * i as f64).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k_grid: KGrid,
    pub inv_bu_list: Vec<f64>,
    pub tol: f64,
    pub n_max: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl SweepConfig {
    /// Grid points in output order: `inv_bu` outer, `k` inner.
    pub fn grid(&self) -> Result<Vec<FlowParams>, ConfigError> {
        let ks = self.k_grid.values();
        let mut grid = Vec::with_capacity(ks.len() * self.inv_bu_list.len());
        for &inv_bu in &self.inv_bu_list {
            for &k in &ks {
                let params = FlowParams::new(k, inv_bu)
                    .map_err(|e| ConfigError::field("k_grid/inv_bu", e.to_string()))?;
                grid.push(params);
            }
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub message: String,
}

impl ConfigError {
    pub fn field(name: &str, reason: impl fmt::Display) -> Self {
        Self {
            message: format!("field `{name}`: {reason}"),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// On-disk form; every key is optional and command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k_start: Option<f64>,
    pub k_stop: Option<f64>,
    pub k_count: Option<usize>,
    pub k_list: Option<Vec<f64>>,
    pub inv_bu: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            message: format!("{}: {e}", path.display()),
        })?;
        toml::from_str(&text).map_err(|e| ConfigError {
            message: format!("{}: {e}", path.display()),
        })
    }

    /// Overlays `flags` on `self` and validates the result.
    pub fn merge(self, flags: FileConfig) -> Result<SweepConfig, ConfigError> {
        let k_start = flags.k_start.or(self.k_start);
        let k_stop = flags.k_stop.or(self.k_stop);
        let k_count = flags.k_count.or(self.k_count);
        let k_list = flags.k_list.or(self.k_list);
        let linear_given = k_start.is_some() || k_stop.is_some() || k_count.is_some();

        let k_grid = match (k_list, linear_given) {
            (Some(_), true) => {
                return Err(ConfigError::field("k_list", "cannot be combined with k_start/k_stop/k_count"))
            }
            (Some(list), false) => {
                if list.is_empty() {
                    return Err(ConfigError::field("k_list", "must not be empty"));
                }
                KGrid::List(list)
            }
            (None, true) => {
                let start = k_start.ok_or_else(|| ConfigError::field("k_start", "missing"))?;
                let stop = k_stop.ok_or_else(|| ConfigError::field("k_stop", "missing"))?;
                let count = k_count.ok_or_else(|| ConfigError::field("k_count", "missing"))?;
                if count < 1 {
                    return Err(ConfigError::field("k_count", "must be >= 1"));
                }
                if count > 1 && !(stop >= start) {
                    return Err(ConfigError::field("k_stop", format!("must be >= k_start ({start}), got {stop}")));
                }
                KGrid::Linear { start, stop, count }
            }
            (None, false) => {
                return Err(ConfigError::field("k_list", "no wave numbers given (use k_list or k_start/k_stop/k_count)"))
            }
        };

        let inv_bu_list = match flags.inv_bu.filter(|v| !v.is_empty()).or(self.inv_bu) {
            Some(list) if list.is_empty() => return Err(ConfigError::field("inv_bu", "must not be empty")),
            Some(list) => list,
            None => vec![0.0],
        };
        if let Some(bad) = inv_bu_list.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(ConfigError::field("inv_bu", format!("must be finite and >= 0, got {bad}")));
        }

        let tol = flags.tol.or(self.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ConfigError::field("tol", format!("must be > 0, got {tol}")));
        }
        let n_max = flags.n_max.or(self.n_max).unwrap_or(DEFAULT_N_MAX);
        if n_max < 4 {
            return Err(ConfigError::field("n_max", format!("must be >= 4, got {n_max}")));
        }

        let config = SweepConfig {
            k_grid,
            inv_bu_list,
            tol,
            n_max,
            output_path: flags.out.or(self.out),
            format: flags.format.or(self.format).unwrap_or_default(),
        };
        config.grid()?;
        Ok(config)
    }
}

/// Rayon pool size from the environment; `None` means the rayon default.
pub fn thread_limit() -> Result<Option<usize>, ConfigError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(ConfigError {
                message: format!("{THREADS_ENV}: expected a positive integer, got {raw:?}"),
            }),
        },
    }
}
