use log::warn;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::pool::Pool;
use crate::util::k_nearest;

/// The `K` nearest DSEL rows of a query, closest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

impl Region {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn region_of_competence(dsel: &Dataset, x: &[f64], k: usize) -> Region {
    region_excluding(dsel, x, k, None)
}

pub(crate) fn region_excluding(dsel: &Dataset, x: &[f64], k: usize, exclude: Option<usize>) -> Region {
    let available = dsel.n_samples() - usize::from(exclude.is_some());
    if available < k {
        warn!("DSEL has {available} rows, fewer than K = {k}; using all of them");
    }
    let (indices, distances) = k_nearest(dsel.rows(), x, k, exclude).into_iter().unzip();
    Region { indices, distances }
}

/// Fraction of positions where two output profiles agree.
pub fn profile_similarity(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Ok(1.0);
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / a.len() as f64)
}

/// Fraction of `samples` that both classifiers get wrong.
pub fn double_fault(ctx: &SelectionContext<'_>, i: usize, j: usize, samples: &[usize]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let both = samples.iter().filter(|&&s| !ctx.hit(s, i) && !ctx.hit(s, j)).count();
    both as f64 / samples.len() as f64
}

/// Pool outputs on every DSEL row, computed once and shared by all queries.
#[derive(Debug, Clone)]
pub struct SelectionContext<'a> {
    pool: &'a Pool,
    dsel: &'a Dataset,
    k: usize,
    m: usize,
    n_classes: usize,
    preds: Vec<usize>,
    supports: Vec<f64>,
}

/// A query point with its region of competence and the pool's outputs on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub x: Vec<f64>,
    pub roc: Region,
    /// Label predicted by each classifier.
    pub profile: Vec<usize>,
    supports: Vec<f64>,
    n_classes: usize,
}

impl Query {
    pub fn support(&self, classifier: usize) -> &[f64] {
        &self.supports[classifier * self.n_classes..(classifier + 1) * self.n_classes]
    }
}

impl<'a> SelectionContext<'a> {
    pub fn new(pool: &'a Pool, dsel: &'a Dataset, k: usize) -> Result<Self> {
        if dsel.n_samples() == 0 || pool.is_empty() {
            return Err(Error::EmptyInput);
        }
        if k == 0 {
            return Err(Error::Invalid("K must be at least 1".into()));
        }
        if dsel.n_features() != pool.n_features() {
            return Err(Error::FeatureArity { expected: pool.n_features(), found: dsel.n_features() });
        }
        let m = pool.len();
        let n_classes = pool.n_classes();
        let mut preds = Vec::with_capacity(dsel.n_samples() * m);
        let mut supports = Vec::with_capacity(dsel.n_samples() * m * n_classes);
        for row in dsel.rows() {
            for c in pool.classifiers() {
                let s = c.predict_support(row)?;
                preds.push(crate::util::argmax(&s));
                supports.extend(s);
            }
        }
        Ok(SelectionContext { pool, dsel, k, m, n_classes, preds, supports })
    }

    pub fn pool(&self) -> &'a Pool {
        self.pool
    }

    pub fn dsel(&self) -> &'a Dataset {
        self.dsel
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pool_size(&self) -> usize {
        self.m
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn all_classifiers(&self) -> Vec<usize> {
        (0..self.m).collect()
    }

    /// Label classifier `i` assigns to DSEL row `s`.
    pub fn prediction(&self, s: usize, i: usize) -> usize {
        self.preds[s * self.m + i]
    }

    /// Output profile of DSEL row `s`.
    pub fn profile(&self, s: usize) -> &[usize] {
        &self.preds[s * self.m..(s + 1) * self.m]
    }

    pub fn support(&self, s: usize, i: usize) -> &[f64] {
        let at = (s * self.m + i) * self.n_classes;
        &self.supports[at..at + self.n_classes]
    }

    pub fn hit(&self, s: usize, i: usize) -> bool {
        self.prediction(s, i) == self.dsel.labels()[s]
    }

    pub fn query(&self, x: &[f64]) -> Result<Query> {
        self.query_excluding(x, None)
    }

    /// Like [`SelectionContext::query`] but never puts DSEL row `exclude` in the region.
    pub fn query_excluding(&self, x: &[f64], exclude: Option<usize>) -> Result<Query> {
        if x.len() != self.dsel.n_features() {
            return Err(Error::FeatureArity { expected: self.dsel.n_features(), found: x.len() });
        }
        let mut profile = Vec::with_capacity(self.m);
        let mut supports = Vec::with_capacity(self.m * self.n_classes);
        for c in self.pool.classifiers() {
            let s = c.predict_support(x)?;
            profile.push(crate::util::argmax(&s));
            supports.extend(s);
        }
        Ok(Query {
            x: x.to_vec(),
            roc: region_excluding(self.dsel, x, self.k, exclude),
            profile,
            supports,
            n_classes: self.n_classes,
        })
    }

    /// Query built from DSEL row `s` itself, leaving it out of its own region.
    pub fn query_for_dsel_row(&self, s: usize) -> Result<Query> {
        self.query_excluding(self.dsel.row(s), Some(s))
    }
}
