//! Selection schemes driven by the pool's hits on the region of competence.
//! Each one works on a candidate subset of the pool and falls back to the
//! whole candidate set when nobody qualifies.

use serde::{Deserialize, Serialize};

use super::region::{profile_similarity, Query, SelectionContext};
use super::SelectionResult;
use crate::util::{plurality, weighted_vote};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McbConfig {
    pub t_s: f64,
    pub t_c: f64,
}

impl Default for McbConfig {
    fn default() -> Self {
        McbConfig { t_s: 0.7, t_c: 0.1 }
    }
}

/// Sizes for the accuracy (`n`) and diversity (`j`) stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesKnnConfig {
    pub n: usize,
    pub j: usize,
}

impl DesKnnConfig {
    pub fn for_pool(m: usize) -> Self {
        DesKnnConfig { n: m.div_ceil(2), j: (3 * m).div_ceil(10) }
    }
}

pub(crate) fn majority(q: &Query, set: &[usize], n_classes: usize) -> usize {
    plurality(set.iter().map(|&i| q.profile[i]), n_classes)
}

pub(crate) fn ensemble(q: &Query, selected: Vec<usize>, n_classes: usize, fallback: bool) -> SelectionResult {
    let predicted_class = majority(q, &selected, n_classes);
    SelectionResult { selected, vote_weights: None, predicted_class, fallback }
}

fn single(q: &Query, i: usize) -> SelectionResult {
    SelectionResult { selected: vec![i], vote_weights: None, predicted_class: q.profile[i], fallback: false }
}

fn hits(ctx: &SelectionContext<'_>, q: &Query, i: usize) -> usize {
    q.roc.indices.iter().filter(|&&s| ctx.hit(s, i)).count()
}

/// First candidate with the highest score.
fn best_of(candidates: &[usize], score: impl Fn(usize) -> f64) -> usize {
    let mut best = candidates[0];
    let mut best_score = score(best);
    for &i in &candidates[1..] {
        let s = score(i);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// Length of the run of hits starting at the closest neighbour.
pub fn rank_competence(ctx: &SelectionContext<'_>, q: &Query, i: usize) -> usize {
    q.roc.indices.iter().take_while(|&&s| ctx.hit(s, i)).count()
}

pub fn select_rank(ctx: &SelectionContext<'_>, q: &Query, candidates: &[usize]) -> SelectionResult {
    single(q, best_of(candidates, |i| rank_competence(ctx, q, i) as f64))
}

/// Accuracy on the neighbours whose class is the one the classifier
/// predicts for the query; 0 if there are none.
pub fn lca_competence(ctx: &SelectionContext<'_>, q: &Query, i: usize) -> f64 {
    let predicted = q.profile[i];
    let labels = ctx.dsel().labels();
    let same: Vec<usize> = q.roc.indices.iter().copied().filter(|&s| labels[s] == predicted).collect();
    if same.is_empty() {
        return 0.0;
    }
    same.iter().filter(|&&s| ctx.hit(s, i)).count() as f64 / same.len() as f64
}

pub fn select_lca(ctx: &SelectionContext<'_>, q: &Query, candidates: &[usize]) -> SelectionResult {
    single(q, best_of(candidates, |i| lca_competence(ctx, q, i)))
}

/// Hits on the behaviourally similar part of the region, over the full region size.
pub fn mcb_competences(ctx: &SelectionContext<'_>, q: &Query, candidates: &[usize], config: &McbConfig) -> Vec<f64> {
    let similar: Vec<usize> = q
        .roc
        .indices
        .iter()
        .copied()
        .filter(|&s| profile_similarity(&q.profile, ctx.profile(s)).unwrap_or(0.0) > config.t_s)
        .collect();
    let size = q.roc.len().max(1) as f64;
    candidates
        .iter()
        .map(|&i| similar.iter().filter(|&&s| ctx.hit(s, i)).count() as f64 / size)
        .collect()
}

pub fn select_mcb(ctx: &SelectionContext<'_>, q: &Query, candidates: &[usize], config: &McbConfig) -> SelectionResult {
    let delta = mcb_competences(ctx, q, candidates, config);
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| delta[b].total_cmp(&delta[a]).then(a.cmp(&b)));
    let best = delta[order[0]];
    let second = order.get(1).map_or(f64::NEG_INFINITY, |&o| delta[o]);
    if best - second > config.t_c {
        single(q, candidates[order[0]])
    } else {
        ensemble(q, candidates.to_vec(), ctx.n_classes(), true)
    }
}

/// Classifiers correct on every one of the closest `k` neighbours, for the
/// largest `k` where any exist.
pub fn kne_oracles(ctx: &SelectionContext<'_>, q: &Query, candidates: &[usize]) -> Option<Vec<usize>> {
    (1..=q.roc.len()).rev().find_map(|k| {
        let region = &q.roc.indices[..k];
        let oracles: Vec<usize> =
            candidates.iter().copied().filter(|&i| region.iter().all(|&s| ctx.hit(s, i))).collect();
        (!oracles.is_empty()).then_some(oracles)
    })
}

pub fn select_kne(ctx: &SelectionContext<'_>, q: &Query, candidates: &[usize]) -> SelectionResult {
    match kne_oracles(ctx, q, candidates) {
        Some(set) => ensemble(q, set, ctx.n_classes(), false),
        None => ensemble(q, candidates.to_vec(), ctx.n_classes(), true),
    }
}

pub fn select_knu(ctx: &SelectionContext<'_>, q: &Query, candidates: &[usize]) -> SelectionResult {
    let (selected, weights): (Vec<usize>, Vec<u32>) = candidates
        .iter()
        .map(|&i| (i, hits(ctx, q, i) as u32))
        .filter(|&(_, w)| w > 0)
        .unzip();
    if selected.is_empty() {
        return ensemble(q, candidates.to_vec(), ctx.n_classes(), true);
    }
    let predicted_class =
        weighted_vote(selected.iter().zip(&weights).map(|(&i, &w)| (q.profile[i], w)), ctx.n_classes());
    SelectionResult { selected, vote_weights: Some(weights), predicted_class, fallback: false }
}

/// The `n` most accurate candidates, then the `j` of those with the lowest
/// summed pairwise double-fault. Ties favour lower classifier indices.
pub fn desknn_selection(ctx: &SelectionContext<'_>, q: &Query, candidates: &[usize], config: &DesKnnConfig) -> Vec<usize> {
    let n = config.n.clamp(1, candidates.len());
    let j = config.j.clamp(1, n);
    let mut by_accuracy: Vec<(usize, usize)> = candidates.iter().map(|&i| (i, hits(ctx, q, i))).collect();
    by_accuracy.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let top: Vec<usize> = by_accuracy[..n].iter().map(|p| p.0).collect();
    // summed double-fault over a shared region, kept as integer counts
    let both_wrong = |i: usize, k: usize| q.roc.indices.iter().filter(|&&s| !ctx.hit(s, i) && !ctx.hit(s, k)).count();
    let mut by_diversity: Vec<(usize, usize)> = top
        .iter()
        .map(|&i| (i, top.iter().filter(|&&k| k != i).map(|&k| both_wrong(i, k)).sum()))
        .collect();
    by_diversity.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    by_diversity[..j].iter().map(|p| p.0).collect()
}

pub fn select_desknn(ctx: &SelectionContext<'_>, q: &Query, candidates: &[usize], config: &DesKnnConfig) -> SelectionResult {
    let set = desknn_selection(ctx, q, candidates, config);
    ensemble(q, set, ctx.n_classes(), false)
}

/// Local accuracy minus the accuracy of random guessing.
pub fn desp_competence(ctx: &SelectionContext<'_>, q: &Query, i: usize) -> f64 {
    hits(ctx, q, i) as f64 / q.roc.len().max(1) as f64 - 1.0 / ctx.n_classes() as f64
}

pub fn select_desp(ctx: &SelectionContext<'_>, q: &Query, candidates: &[usize]) -> SelectionResult {
    let size = q.roc.len();
    let l = ctx.n_classes();
    // hits/size > 1/L, compared exactly in integers
    let selected: Vec<usize> = candidates.iter().copied().filter(|&i| hits(ctx, q, i) * l > size).collect();
    if selected.is_empty() {
        ensemble(q, candidates.to_vec(), l, true)
    } else {
        ensemble(q, selected, l, false)
    }
}

/// Classifiers that correctly label at least one pair of region samples from
/// different classes; the full pool when the region is single-class or no
/// classifier qualifies.
pub fn dfp_prune(ctx: &SelectionContext<'_>, q: &Query) -> Vec<usize> {
    let labels = ctx.dsel().labels();
    let all = ctx.all_classifiers();
    let first = labels[q.roc.indices[0]];
    if q.roc.indices.iter().all(|&s| labels[s] == first) {
        return all;
    }
    let kept: Vec<usize> = all
        .iter()
        .copied()
        .filter(|&i| {
            let mut classes = q.roc.indices.iter().filter(|&&s| ctx.hit(s, i)).map(|&s| labels[s]);
            classes.next().is_some_and(|c| classes.any(|d| d != c))
        })
        .collect();
    if kept.is_empty() { all } else { kept }
}
