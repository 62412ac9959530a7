//! Unpruned CART classification trees with Gini impurity.

use ndarray::Array2;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::util::{argmax, Rng};

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// Minimum weighted impurity decrease required to split a node.
    pub min_impurity_decrease: f64,
    pub max_depth: Option<usize>,
    /// Features examined per node, drawn at random; `None` examines all.
    pub max_features: Option<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { min_impurity_decrease: 0.05, max_depth: None, max_features: None }
    }
}

impl TreeConfig {
    pub fn unpruned() -> Self {
        TreeConfig { min_impurity_decrease: 0.0, ..Default::default() }
    }

    pub fn stump() -> Self {
        TreeConfig { min_impurity_decrease: 0.0, max_depth: Some(1), max_features: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// `x[feature] <= threshold` goes left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { class_counts: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_classes: usize,
    n_features: usize,
}

fn gini(counts: &[u32], n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = f64::from(n);
    1.0 - counts.iter().map(|&c| (f64::from(c) / n).powi(2)).sum::<f64>()
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

fn best_split(
    x: &Array2<f64>,
    y: &[usize],
    idx: &[usize],
    features: &[usize],
    n_classes: usize,
    n_total: usize,
) -> Option<BestSplit> {
    let n_t = idx.len() as u32;
    let mut parent = vec![0u32; n_classes];
    for &i in idx {
        parent[y[i]] += 1;
    }
    let imp = gini(&parent, n_t);
    let frac = f64::from(n_t) / n_total as f64;

    let mut best: Option<BestSplit> = None;
    let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(idx.len());
    let mut left = vec![0u32; n_classes];
    let mut right = vec![0u32; n_classes];
    for &f in features {
        pairs.clear();
        pairs.extend(idx.iter().map(|&i| (x[[i, f]], y[i])));
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        left.iter_mut().for_each(|c| *c = 0);
        right.copy_from_slice(&parent);
        for k in 0..pairs.len() - 1 {
            let (v, label) = pairs[k];
            left[label] += 1;
            right[label] -= 1;
            let next = pairs[k + 1].0;
            if next <= v {
                continue;
            }
            let n_l = (k + 1) as u32;
            let n_r = n_t - n_l;
            let weighted = f64::from(n_l) / f64::from(n_t) * gini(&left, n_l)
                + f64::from(n_r) / f64::from(n_t) * gini(&right, n_r);
            let decrease = frac * (imp - weighted);
            if best.as_ref().is_none_or(|b| decrease > b.decrease + EPS) {
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                best = Some(BestSplit { feature: f, threshold, decrease });
            }
        }
    }
    best
}

impl DecisionTree {
    /// Grows a tree on rows of `x` labelled `y` (labels in `0..n_classes`).
    pub fn fit(x: &Array2<f64>, y: &[usize], n_classes: usize, config: &TreeConfig, rng: &mut Rng) -> Result<Self> {
        if x.nrows() == 0 || y.is_empty() {
            return Err(Error::EmptyInput);
        }
        if x.nrows() != y.len() {
            return Err(Error::LengthMismatch(x.nrows(), y.len()));
        }
        if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
            return Err(Error::Invalid(format!("label {bad} outside 0..{n_classes}")));
        }
        let n_total = y.len();
        let n_features = x.ncols();
        let all_features: Vec<usize> = (0..n_features).collect();

        let mut nodes: Vec<Node> = Vec::new();
        // (node slot, sample indices, depth)
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(0, (0..n_total).collect(), 0)];
        nodes.push(Node::Leaf { class_counts: Vec::new() });

        while let Some((slot, idx, depth)) = stack.pop() {
            let mut counts = vec![0u32; n_classes];
            for &i in &idx {
                counts[y[i]] += 1;
            }
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let depth_capped = config.max_depth.is_some_and(|d| depth >= d);
            if pure || idx.len() < 2 || depth_capped {
                nodes[slot] = Node::Leaf { class_counts: counts };
                continue;
            }
            let features = match config.max_features {
                Some(m) if m < n_features => {
                    let mut f = sample(rng, n_features, m.max(1)).into_vec();
                    f.sort_unstable();
                    f
                }
                _ => all_features.clone(),
            };
            let split = best_split(x, y, &idx, &features, n_classes, n_total)
                .filter(|s| s.decrease >= config.min_impurity_decrease - EPS);
            let Some(split) = split else {
                nodes[slot] = Node::Leaf { class_counts: counts };
                continue;
            };
            let (l_idx, r_idx): (Vec<usize>, Vec<usize>) =
                idx.iter().partition(|&&i| x[[i, split.feature]] <= split.threshold);
            let left = nodes.len();
            let right = left + 1;
            nodes.push(Node::Leaf { class_counts: Vec::new() });
            nodes.push(Node::Leaf { class_counts: Vec::new() });
            nodes[slot] = Node::Split { feature: split.feature, threshold: split.threshold, left, right };
            stack.push((right, r_idx, depth + 1));
            stack.push((left, l_idx, depth + 1));
        }
        Ok(DecisionTree { nodes, n_classes, n_features })
    }

    pub fn fit_dataset(data: &Dataset, config: &TreeConfig, rng: &mut Rng) -> Result<Self> {
        Self::fit(data.features(), data.labels(), data.n_classes(), config, rng)
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    fn leaf_counts(&self, x: &[f64]) -> Result<&[u32]> {
        if x.len() != self.n_features {
            return Err(Error::FeatureArity { expected: self.n_features, found: x.len() });
        }
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { class_counts } => return Ok(class_counts),
                Node::Split { feature, threshold, left, right } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(self.leaf_counts(x)?))
    }

    pub fn predict_support(&self, x: &[f64]) -> Result<Vec<f64>> {
        let counts = self.leaf_counts(x)?;
        let total: u32 = counts.iter().sum();
        Ok(counts.iter().map(|&c| f64::from(c) / f64::from(total)).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let tree: DecisionTree = serde_json::from_str(text)?;
        tree.validate()?;
        Ok(tree)
    }

    /// Checks structural invariants of a deserialized tree.
    fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Invalid("tree has no nodes".into()));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Leaf { class_counts } => {
                    if class_counts.len() != self.n_classes || class_counts.iter().sum::<u32>() == 0 {
                        return Err(Error::Invalid(format!("malformed leaf at node {i}")));
                    }
                }
                Node::Split { feature, left, right, .. } => {
                    // children always follow their parent, which rules out cycles
                    if *feature >= self.n_features
                        || *left <= i
                        || *right <= i
                        || *left >= self.nodes.len()
                        || *right >= self.nodes.len()
                    {
                        return Err(Error::Invalid(format!("malformed split at node {i}")));
                    }
                }
            }
        }
        Ok(())
    }
}
