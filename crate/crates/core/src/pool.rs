//! Bagged pools of CART trees with per-bootstrap resampling, and the
//! augmented dynamic-selection set (DSEL).

use std::fs;
use std::path::Path;

use log::warn;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cart::{DecisionTree, TreeConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::resample::{apply_multiclass, ResampleParams, ResampleVariant};
use crate::util::{derive_seed, plurality, rng_from_seed, Rng};

const MAX_REDRAWS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    pub size: usize,
    /// Bootstrap size as a fraction of the training set (rounded up).
    pub bootstrap_fraction: f64,
    pub tree: TreeConfig,
    pub resample: ResampleParams,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            size: 100,
            bootstrap_fraction: 0.5,
            tree: TreeConfig::default(),
            resample: ResampleParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pool {
    classifiers: Vec<DecisionTree>,
    variant: ResampleVariant,
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    variant: String,
    seed: u64,
    size: usize,
    n_classes: usize,
    n_features: usize,
    scaling: Option<String>,
}

fn bootstrap(n: usize, size: usize, labels: &[usize], n_classes: usize, rng: &mut Rng) -> Vec<usize> {
    let mut present = vec![false; n_classes];
    labels.iter().for_each(|&l| present[l] = true);
    let wanted = present.iter().filter(|&&p| p).count();
    let mut draw = Vec::new();
    for attempt in 0..=MAX_REDRAWS {
        draw = (0..size).map(|_| rng.random_range(0..n)).collect();
        let mut seen = vec![false; n_classes];
        draw.iter().for_each(|&i| seen[labels[i]] = true);
        if seen.iter().filter(|&&s| s).count() == wanted {
            return draw;
        }
        if attempt == MAX_REDRAWS {
            warn!("bootstrap still misses a class after {MAX_REDRAWS} redraws; using it anyway");
        }
    }
    draw
}

impl Pool {
    pub fn from_classifiers(classifiers: Vec<DecisionTree>, variant: ResampleVariant, seed: u64) -> Result<Self> {
        let first = classifiers.first().ok_or(Error::EmptyInput)?;
        let (l, d) = (first.n_classes(), first.n_features());
        if classifiers.iter().any(|c| c.n_classes() != l || c.n_features() != d) {
            return Err(Error::Invalid("pool members disagree on classes or features".into()));
        }
        Ok(Pool { classifiers, variant, seed })
    }

    pub fn classifiers(&self) -> &[DecisionTree] {
        &self.classifiers
    }

    pub fn len(&self) -> usize {
        self.classifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classifiers.is_empty()
    }

    pub fn variant(&self) -> ResampleVariant {
        self.variant
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_classes(&self) -> usize {
        self.classifiers[0].n_classes()
    }

    pub fn n_features(&self) -> usize {
        self.classifiers[0].n_features()
    }

    pub fn predict_all(&self, x: &[f64]) -> Result<Vec<usize>> {
        self.classifiers.iter().map(|c| c.predict(x)).collect()
    }

    /// Plurality vote of every member.
    pub fn majority_vote(&self, x: &[f64]) -> Result<usize> {
        Ok(plurality(self.predict_all(x)?, self.n_classes()))
    }

    pub fn save(&self, dir: &Path, scaling: Option<&str>) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (i, tree) in self.classifiers.iter().enumerate() {
            fs::write(dir.join(format!("tree_{i:04}.json")), tree.to_json()?)?;
        }
        let manifest = Manifest {
            variant: self.variant.name().to_string(),
            seed: self.seed,
            size: self.len(),
            n_classes: self.n_classes(),
            n_features: self.n_features(),
            scaling: scaling.map(str::to_string),
        };
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    /// Loads a pool written by [`Pool::save`], returning the scaling reference too.
    pub fn load(dir: &Path) -> Result<(Self, Option<String>)> {
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
        let classifiers = (0..manifest.size)
            .map(|i| DecisionTree::from_json(&fs::read_to_string(dir.join(format!("tree_{i:04}.json")))?))
            .collect::<Result<Vec<_>>>()?;
        let pool = Pool::from_classifiers(classifiers, manifest.variant.parse()?, manifest.seed)?;
        if pool.n_classes() != manifest.n_classes || pool.n_features() != manifest.n_features {
            return Err(Error::Invalid("pool manifest does not match its trees".into()));
        }
        Ok((pool, manifest.scaling))
    }
}

/// Grows `config.size` trees, each on a resampled bootstrap of `train`.
pub fn generate_pool(train: &Dataset, variant: ResampleVariant, config: &PoolConfig, seed: u64) -> Result<Pool> {
    let n = train.n_samples();
    if n == 0 || config.size == 0 {
        return Err(Error::EmptyInput);
    }
    let size = ((config.bootstrap_fraction * n as f64).ceil() as usize).max(1);
    let classifiers = (0..config.size)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let draw = bootstrap(n, size, train.labels(), train.n_classes(), &mut rng);
            let sample = train.subset(&draw);
            let resampled = apply_multiclass(&sample, variant, &config.resample, &mut rng)?;
            let fitted = resampled.materialize(&sample)?;
            DecisionTree::fit_dataset(&fitted, &config.tree, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Pool::from_classifiers(classifiers, variant, seed)
}

/// The training set plus the synthetic rows `variant` produces on it.
#[derive(Debug, Clone, PartialEq)]
pub struct DselSet {
    pub data: Dataset,
    /// The first `n_original` rows are the training rows, in order.
    pub n_original: usize,
    pub variant: ResampleVariant,
}

pub fn build_dsel(train: &Dataset, variant: ResampleVariant, params: &ResampleParams, seed: u64) -> Result<DselSet> {
    if train.n_samples() == 0 {
        return Err(Error::EmptyInput);
    }
    let resampled = apply_multiclass(train, variant, params, &mut rng_from_seed(seed))?;
    Ok(DselSet { data: resampled.augment(train)?, n_original: train.n_samples(), variant })
}
