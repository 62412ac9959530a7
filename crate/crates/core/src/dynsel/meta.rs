//! Meta-learned competence: per-classifier meta-features and a Gaussian
//! naive Bayes model predicting whether a classifier will be right.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::region::{profile_similarity, Query, SelectionContext};
use super::selectors::ensemble;
use super::SelectionResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaConfig {
    /// Size of the output-profile neighbourhood.
    pub kp: usize,
    /// Posterior above which a classifier counts as competent.
    pub threshold: f64,
}

impl Default for MetaConfig {
    fn default() -> Self {
        MetaConfig { kp: 5, threshold: 0.5 }
    }
}

pub fn meta_feature_len(k: usize, kp: usize) -> usize {
    2 * k + 1 + kp + 1
}

/// The `kp` DSEL rows whose output profiles agree most with `profile`;
/// ties favour lower row indices.
pub fn profile_neighbors(ctx: &SelectionContext<'_>, profile: &[usize], kp: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut scored: Vec<(usize, f64)> = (0..ctx.dsel().n_samples())
        .filter(|&s| Some(s) != exclude)
        .map(|s| (s, profile_similarity(profile, ctx.profile(s)).unwrap_or(0.0)))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.into_iter().take(kp).map(|p| p.0).collect()
}

/// Meta-features of classifier `i` for a query: region hits, supports for the
/// neighbours' true classes, local accuracy, hits on the profile
/// neighbourhood and the classifier's confidence on the query. Missing
/// neighbours are padded with zeros.
pub fn extract_meta_features(
    ctx: &SelectionContext<'_>,
    q: &Query,
    i: usize,
    profile_nbrs: &[usize],
    kp: usize,
) -> Vec<f64> {
    let k = ctx.k();
    let labels = ctx.dsel().labels();
    let mut f = Vec::with_capacity(meta_feature_len(k, kp));
    let hits: Vec<f64> = q.roc.indices.iter().map(|&s| if ctx.hit(s, i) { 1.0 } else { 0.0 }).collect();
    f.extend(hits.iter().copied());
    f.resize(k, 0.0);
    f.extend(q.roc.indices.iter().map(|&s| ctx.support(s, i)[labels[s]]));
    f.resize(2 * k, 0.0);
    f.push(if hits.is_empty() { 0.0 } else { hits.iter().sum::<f64>() / hits.len() as f64 });
    f.extend(profile_nbrs.iter().map(|&s| if ctx.hit(s, i) { 1.0 } else { 0.0 }));
    f.resize(2 * k + 1 + kp, 0.0);
    f.push(q.support(i).iter().copied().fold(0.0, f64::max));
    f
}

/// Two-class Gaussian naive Bayes; class 1 means "competent".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GaussianNb {
    Fitted { log_priors: [f64; 2], means: [Vec<f64>; 2], vars: [Vec<f64>; 2] },
    /// Training data had a single label; always answers this posterior.
    Constant(f64),
}

const VAR_SMOOTHING: f64 = 1e-9;

impl GaussianNb {
    pub fn fit(x: &[Vec<f64>], y: &[bool]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptyInput);
        }
        if x.len() != y.len() {
            return Err(Error::LengthMismatch(x.len(), y.len()));
        }
        let n1 = y.iter().filter(|&&b| b).count();
        if n1 == 0 || n1 == y.len() {
            warn!("meta-training set has a single meta-class; using a constant meta-classifier");
            return Ok(GaussianNb::Constant(if n1 == 0 { 0.0 } else { 1.0 }));
        }
        let d = x[0].len();
        let moments = |rows: &mut dyn Iterator<Item = &Vec<f64>>| {
            let mut n = 0.0;
            let mut sum = vec![0.0; d];
            let mut sq = vec![0.0; d];
            for r in rows {
                n += 1.0;
                for j in 0..d {
                    sum[j] += r[j];
                    sq[j] += r[j] * r[j];
                }
            }
            let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
            let var: Vec<f64> = (0..d).map(|j| (sq[j] / n - mean[j] * mean[j]).max(0.0)).collect();
            (n, mean, var)
        };
        let (_, _, all_var) = moments(&mut x.iter());
        let eps = VAR_SMOOTHING * all_var.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let (n0, m0, v0) = moments(&mut x.iter().zip(y).filter(|p| !*p.1).map(|p| p.0));
        let (n1, m1, v1) = moments(&mut x.iter().zip(y).filter(|p| *p.1).map(|p| p.0));
        let total = n0 + n1;
        Ok(GaussianNb::Fitted {
            log_priors: [(n0 / total).ln(), (n1 / total).ln()],
            means: [m0, m1],
            vars: [v0.into_iter().map(|v| v + eps).collect(), v1.into_iter().map(|v| v + eps).collect()],
        })
    }

    /// Posterior probability of class 1.
    pub fn posterior(&self, x: &[f64]) -> f64 {
        match self {
            GaussianNb::Constant(p) => *p,
            GaussianNb::Fitted { log_priors, means, vars } => {
                let joint = |c: usize| {
                    log_priors[c]
                        + x.iter()
                            .zip(means[c].iter().zip(&vars[c]))
                            .map(|(v, (m, s2))| -0.5 * ((2.0 * std::f64::consts::PI * s2).ln() + (v - m).powi(2) / s2))
                            .sum::<f64>()
                };
                let (a, b) = (joint(0), joint(1));
                1.0 / (1.0 + (a - b).exp())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaClassifier {
    pub model: GaussianNb,
    pub config: MetaConfig,
    /// Number of (sample, classifier) pairs it was trained on.
    pub n_pairs: usize,
}

/// Builds the meta-training set from DSEL rows `0..n_train` (the training
/// rows) and fits the meta-classifier. A row never appears in its own
/// neighbourhoods.
pub fn train_meta_classifier(ctx: &SelectionContext<'_>, n_train: usize, config: &MetaConfig) -> Result<MetaClassifier> {
    if n_train == 0 || n_train > ctx.dsel().n_samples() {
        return Err(Error::Invalid(format!("meta-training needs 1..={} rows, got {n_train}", ctx.dsel().n_samples())));
    }
    let per_row = (0..n_train)
        .into_par_iter()
        .map(|s| {
            let q = ctx.query_for_dsel_row(s)?;
            let nbrs = profile_neighbors(ctx, &q.profile, config.kp, Some(s));
            Ok((0..ctx.pool_size())
                .map(|i| (extract_meta_features(ctx, &q, i, &nbrs, config.kp), ctx.hit(s, i)))
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let (x, y): (Vec<Vec<f64>>, Vec<bool>) = per_row.into_iter().flatten().unzip();
    let n_pairs = x.len();
    Ok(MetaClassifier { model: GaussianNb::fit(&x, &y)?, config: *config, n_pairs })
}

pub fn meta_competences(ctx: &SelectionContext<'_>, meta: &MetaClassifier, q: &Query, candidates: &[usize]) -> Vec<f64> {
    let nbrs = profile_neighbors(ctx, &q.profile, meta.config.kp, None);
    candidates
        .iter()
        .map(|&i| meta.model.posterior(&extract_meta_features(ctx, q, i, &nbrs, meta.config.kp)))
        .collect()
}

pub fn select_metades(ctx: &SelectionContext<'_>, meta: &MetaClassifier, q: &Query, candidates: &[usize]) -> SelectionResult {
    let delta = meta_competences(ctx, meta, q, candidates);
    let selected: Vec<usize> = candidates
        .iter()
        .zip(&delta)
        .filter(|(_, &d)| d > meta.config.threshold)
        .map(|(&i, _)| i)
        .collect();
    if selected.is_empty() {
        ensemble(q, candidates.to_vec(), ctx.n_classes(), true)
    } else {
        ensemble(q, selected, ctx.n_classes(), false)
    }
}
