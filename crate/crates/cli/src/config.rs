use std::path::{Path, PathBuf};

use imbdes::dynsel::{DesKnnConfig, McbConfig, Scheme};
use imbdes::eval::Metric;
use imbdes::util::derive_seed_str;
use imbdes::ResampleVariant;
use serde::{Deserialize, Serialize};

use crate::BenchError;

fn default_pool_size() -> usize {
    100
}

fn default_k() -> usize {
    7
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

/// Experiment description, read from TOML. Names are checked by
/// [`RunConfig::validate`] before any work starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub datasets: Vec<PathBuf>,
    #[serde(default)]
    pub variants: Vec<String>,
    #[serde(default)]
    pub selectors: Vec<String>,
    #[serde(default)]
    pub metrics: Vec<String>,
    #[serde(default = "default_pool_size")]
    pub pool_size: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub mcb: Option<McbConfig>,
    #[serde(default)]
    pub desknn: Option<DesKnnConfig>,
}

/// A validated configuration with parsed names. Empty lists mean "all".
#[derive(Debug, Clone)]
pub struct Plan {
    pub config: RunConfig,
    pub variants: Vec<ResampleVariant>,
    pub selectors: Vec<Scheme>,
    pub metrics: Vec<Metric>,
}

fn parse_all<T: std::str::FromStr<Err = imbdes::Error> + Copy>(names: &[String], all: &[T]) -> Result<Vec<T>, BenchError> {
    if names.is_empty() {
        return Ok(all.to_vec());
    }
    names
        .iter()
        .map(|n| n.parse::<T>().map_err(|_| BenchError::Validation(format!("unknown name `{n}`"))))
        .collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Validation(e.to_string()))
    }

    /// Reads a config file; relative dataset and output paths resolve against
    /// the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Validation(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for d in &mut config.datasets {
            if d.is_relative() {
                *d = base.join(&*d);
            }
        }
        if config.output.is_relative() {
            config.output = base.join(&config.output);
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<Plan, BenchError> {
        if self.datasets.is_empty() {
            return Err(BenchError::Validation("no datasets listed".into()));
        }
        if self.pool_size == 0 || self.k == 0 {
            return Err(BenchError::Validation("pool_size and k must be positive".into()));
        }
        if let Some(d) = &self.desknn {
            if d.j == 0 || d.j > d.n || d.n > self.pool_size {
                return Err(BenchError::Validation("desknn needs 1 <= j <= n <= pool_size".into()));
            }
        }
        if let Some(m) = &self.mcb {
            if !(0.0..=1.0).contains(&m.t_s) || m.t_c < 0.0 {
                return Err(BenchError::Validation("mcb needs t_s in [0, 1] and t_c >= 0".into()));
            }
        }
        let mut names: Vec<String> = self.datasets.iter().map(|d| dataset_name(d)).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(BenchError::Validation("two datasets share a file name".into()));
        }
        Ok(Plan {
            config: self.clone(),
            variants: parse_all(&self.variants, &ResampleVariant::ALL)?,
            selectors: parse_all(&self.selectors, &Scheme::ALL)?,
            metrics: parse_all(&self.metrics, &Metric::ALL)?,
        })
    }
}

impl Plan {
    /// Stable fingerprint of everything that affects results.
    pub fn hash(&self) -> String {
        let c = &self.config;
        let key = format!(
            "{:?}|{:?}|{:?}|{:?}|{}|{}|{}|{:?}|{:?}",
            c.datasets.iter().map(|d| dataset_name(d)).collect::<Vec<_>>(),
            self.variants,
            self.selectors,
            self.metrics,
            c.pool_size,
            c.k,
            c.seed,
            c.mcb,
            c.desknn
        );
        format!("{:016x}", derive_seed_str(0, &key))
    }
}

pub fn dataset_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_toml("datasets = [\"a.dat\"]\n").unwrap();
        let plan = c.validate().unwrap();
        assert_eq!(plan.variants.len(), 6);
        assert_eq!(plan.selectors.len(), 15);
        assert_eq!(plan.metrics.len(), 3);
        assert_eq!((c.pool_size, c.k), (100, 7));
    }

    #[test]
    fn bad_names_fail_validation() {
        let c = RunConfig::from_toml("datasets = [\"a.dat\"]\nselectors = [\"KNU\", \"NOPE\"]\n").unwrap();
        assert!(matches!(c.validate(), Err(BenchError::Validation(_))));
        assert!(RunConfig::from_toml("datasets = []\nbogus = 1\n").is_err());
    }

    #[test]
    fn hash_tracks_settings() {
        let a = RunConfig::from_toml("datasets = [\"a.dat\"]\nseed = 1\n").unwrap().validate().unwrap();
        let b = RunConfig::from_toml("datasets = [\"a.dat\"]\nseed = 2\n").unwrap().validate().unwrap();
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), a.clone().hash());
    }
}
