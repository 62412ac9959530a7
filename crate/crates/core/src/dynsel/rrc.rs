//! Randomized-reference-classifier competence.

use std::collections::HashMap;

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::region::{Query, SelectionContext};
use super::selectors::ensemble;
use super::SelectionResult;
use crate::util::{derive_seed, derive_seed_str, k_nearest, rng_from_seed, Rng};

const EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RrcConfig {
    /// Monte-Carlo draws per support vector.
    pub draws: usize,
    /// The sum runs over the `neighbors_factor · K` nearest DSEL rows.
    pub neighbors_factor: usize,
}

impl Default for RrcConfig {
    fn default() -> Self {
        RrcConfig { draws: 1000, neighbors_factor: 30 }
    }
}

/// Chance that a random classifier whose supports follow a Dirichlet
/// centred on `support` ranks `true_class` first.
pub fn rrc_correct_probability(support: &[f64], true_class: usize, draws: usize, rng: &mut Rng) -> f64 {
    if draws == 0 {
        return 0.0;
    }
    let l = support.len() as f64;
    let gammas: Vec<Gamma<f64>> = support
        .iter()
        .map(|&s| Gamma::new(l * s + EPSILON, 1.0).expect("positive shape"))
        .collect();
    let mut wins = 0usize;
    let mut sample = vec![0.0; support.len()];
    for _ in 0..draws {
        for (v, g) in sample.iter_mut().zip(&gammas) {
            *v = g.sample(rng);
        }
        let target = sample[true_class];
        if sample.iter().enumerate().all(|(c, &v)| c == true_class || v <= target) {
            wins += 1;
        }
    }
    wins as f64 / draws as f64
}

pub fn gaussian_potential(distance: f64) -> f64 {
    (-distance * distance).exp()
}

/// Source competence of every classifier on every DSEL row, centred so that
/// random behaviour scores 0.
#[derive(Debug, Clone)]
pub struct RrcTable {
    m: usize,
    c_src: Vec<f64>,
}

impl RrcTable {
    pub fn compute(ctx: &SelectionContext<'_>, config: &RrcConfig, seed: u64) -> Self {
        let m = ctx.pool_size();
        let l = ctx.n_classes();
        let labels = ctx.dsel().labels();
        let base = derive_seed_str(seed, "rrc");
        // leaf supports repeat a lot, so estimates are shared per distinct
        // (support, class); each gets a seed derived from its own key
        let mut cache: HashMap<(Vec<u64>, usize), f64> = HashMap::new();
        let mut c_src = Vec::with_capacity(labels.len() * m);
        for (s, &y) in labels.iter().enumerate() {
            for i in 0..m {
                let support = ctx.support(s, i);
                let key: Vec<u64> = support.iter().map(|v| v.to_bits()).collect();
                let p = *cache.entry((key, y)).or_insert_with_key(|(bits, class)| {
                    let mut h = derive_seed(base, *class as u64);
                    for b in bits {
                        h = derive_seed(h, *b);
                    }
                    rrc_correct_probability(support, y, config.draws, &mut rng_from_seed(h))
                });
                c_src.push(p - 1.0 / l as f64);
            }
        }
        RrcTable { m, c_src }
    }

    pub fn source_competence(&self, s: usize, i: usize) -> f64 {
        self.c_src[s * self.m + i]
    }
}

/// Potential-weighted sum of source competences over the query's neighbourhood.
pub fn rrc_competences(
    ctx: &SelectionContext<'_>,
    table: &RrcTable,
    q: &Query,
    candidates: &[usize],
    config: &RrcConfig,
) -> Vec<f64> {
    let reach = config.neighbors_factor.max(1) * ctx.k();
    let near = k_nearest(ctx.dsel().rows(), &q.x, reach, None);
    candidates
        .iter()
        .map(|&i| near.iter().map(|&(s, d)| table.source_competence(s, i) * gaussian_potential(d)).sum())
        .collect()
}

pub fn select_desrrc(
    ctx: &SelectionContext<'_>,
    table: &RrcTable,
    q: &Query,
    candidates: &[usize],
    config: &RrcConfig,
) -> SelectionResult {
    let delta = rrc_competences(ctx, table, q, candidates, config);
    let selected: Vec<usize> = candidates.iter().zip(&delta).filter(|(_, &d)| d > 0.0).map(|(&i, _)| i).collect();
    if selected.is_empty() {
        ensemble(q, candidates.to_vec(), ctx.n_classes(), true)
    } else {
        ensemble(q, selected, ctx.n_classes(), false)
    }
}
