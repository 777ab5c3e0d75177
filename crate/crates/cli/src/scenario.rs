//! Scenario files for `calibrate`, written in TOML:
//!
//! ```toml
//! n = 500
//! before = "normal:0,1"
//! after = "normal:1,1"      # optional, together with change_fraction
//! change_fraction = 0.5
//! kernel = "diff"
//! weight = "one"
//! reps = 2000
//! seed = 7
//! alpha = 0.05
//! remainder_n = [200, 800]     # optional remainder diagnostic
//!
//! [law]                      # optional; defaults to a fresh simulation
//! grid = 2048
//! reps = 100000
//! seed = 1
//! # cache = "bridge_one.law"  (relative to the scenario file)
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use ucpd_core::detector::ScenarioSpec;
use ucpd_core::dist::Distribution;
use ucpd_core::limitsim::DEFAULT_GRID;

use crate::error::{CliError, CliResult};

pub const DEFAULT_LAW_REPS: usize = 100_000;
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LawSection {
    pub cache: Option<PathBuf>,
    pub grid: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub n: usize,
    pub before: String,
    pub after: Option<String>,
    pub change_fraction: Option<f64>,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default = "default_weight")]
    pub weight: String,
    pub reps: usize,
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub remainder_n: Vec<usize>,
    pub law: Option<LawSection>,
}

fn default_kernel() -> String {
    "sign_diff".into()
}

fn default_weight() -> String {
    "one".into()
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

/// Where the limit law of a run comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum LawSource {
    Cache(PathBuf),
    Simulate { grid: usize, reps: usize, seed: u64 },
}

impl ScenarioFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Scenario(e.to_string()))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn spec(&self) -> CliResult<ScenarioSpec> {
        let dist = |s: &str| s.parse::<Distribution>().map_err(CliError::from);
        let mut spec = ScenarioSpec::null(
            self.n,
            dist(&self.before)?,
            &self.kernel,
            &self.weight,
            self.reps,
            self.seed,
        );
        match (&self.after, self.change_fraction) {
            (Some(after), Some(tau)) => spec = spec.with_change(tau, dist(after)?),
            (None, None) => {}
            _ => {
                return Err(CliError::Scenario(
                    "`after` and `change_fraction` go together".into(),
                ))
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    /// The law source, with a relative cache path resolved against `base`.
    pub fn law_source(&self, base: &Path) -> CliResult<LawSource> {
        let Some(law) = &self.law else {
            return Ok(LawSource::Simulate {
                grid: DEFAULT_GRID,
                reps: DEFAULT_LAW_REPS,
                seed: self.seed,
            });
        };
        match &law.cache {
            Some(path) => {
                if law.grid.is_some() || law.reps.is_some() || law.seed.is_some() {
                    return Err(CliError::Scenario(
                        "[law] takes either `cache` or simulation settings".into(),
                    ));
                }
                Ok(LawSource::Cache(base.join(path)))
            }
            None => Ok(LawSource::Simulate {
                grid: law.grid.unwrap_or(DEFAULT_GRID),
                reps: law.reps.unwrap_or(DEFAULT_LAW_REPS),
                seed: law.seed.unwrap_or(self.seed),
            }),
        }
    }
}
