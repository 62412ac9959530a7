use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    Auc,
    FMeasure,
    GMean,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Auc, Metric::FMeasure, Metric::GMean];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Auc => "auc",
            Metric::FMeasure => "fmeasure",
            Metric::GMean => "gmean",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// Ranks starting at 1 for the smallest value; ties share their mean rank.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let mean = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    ranks
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch(a, b));
    }
    if a == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// A(i|j): chance that a random class-`i` sample scores higher on column
/// `i` than a random class-`j` sample, from mean ranks.
fn pairwise_a(scores: &[Vec<f64>], labels: &[usize], i: usize, j: usize) -> f64 {
    let members: Vec<usize> = (0..labels.len()).filter(|&s| labels[s] == i || labels[s] == j).collect();
    let values: Vec<f64> = members.iter().map(|&s| scores[s][i]).collect();
    let ranks = fractional_ranks(&values);
    let n_i = members.iter().filter(|&&s| labels[s] == i).count() as f64;
    let n_j = members.len() as f64 - n_i;
    let rank_sum: f64 = members.iter().zip(&ranks).filter(|(&s, _)| labels[s] == i).map(|(_, r)| r).sum();
    (rank_sum - n_i * (n_i + 1.0) / 2.0) / (n_i * n_j)
}

/// Hand & Till multi-class AUC: the mean over class pairs of
/// `(A(i|j) + A(j|i)) / 2`. Pairs with an absent class are skipped.
pub fn auc_multiclass(scores: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    check_lengths(scores.len(), labels.len())?;
    let l = scores[0].len();
    if scores.iter().any(|r| r.len() != l) {
        return Err(Error::Invalid("score rows differ in length".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= l) {
        return Err(Error::Invalid(format!("label {bad} has no score column")));
    }
    let mut present = vec![0usize; l];
    labels.iter().for_each(|&y| present[y] += 1);
    let mut total = 0.0;
    let mut pairs = 0usize;
    let mut skipped = 0usize;
    for i in 0..l {
        for j in i + 1..l {
            if present[i] == 0 || present[j] == 0 {
                skipped += 1;
                continue;
            }
            total += (pairwise_a(scores, labels, i, j) + pairwise_a(scores, labels, j, i)) / 2.0;
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(Error::TooFewClasses);
    }
    if skipped > 0 {
        warn!("AUC: skipped {skipped} class pairs with an absent class");
    }
    Ok(total / pairs as f64)
}

/// `counts[true][predicted]`.
pub fn confusion_matrix(predictions: &[usize], labels: &[usize], n_classes: usize) -> Result<Vec<Vec<usize>>> {
    check_lengths(predictions.len(), labels.len())?;
    let mut cm = vec![vec![0usize; n_classes]; n_classes];
    for (&p, &y) in predictions.iter().zip(labels) {
        if p >= n_classes || y >= n_classes {
            return Err(Error::Invalid(format!("class id outside 0..{n_classes}")));
        }
        cm[y][p] += 1;
    }
    Ok(cm)
}

fn n_classes_of(predictions: &[usize], labels: &[usize]) -> usize {
    predictions.iter().chain(labels).copied().max().map_or(0, |m| m + 1)
}

/// Per-class F1 weighted by each class's share of `labels`.
pub fn f_measure_weighted(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    let l = n_classes_of(predictions, labels);
    let cm = confusion_matrix(predictions, labels, l)?;
    let n = labels.len() as f64;
    let mut total = 0.0;
    for c in 0..l {
        let support: usize = cm[c].iter().sum();
        if support == 0 {
            continue;
        }
        let tp = cm[c][c] as f64;
        let predicted: usize = cm.iter().map(|row| row[c]).sum();
        let precision = if predicted == 0 { 0.0 } else { tp / predicted as f64 };
        let recall = tp / support as f64;
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        total += support as f64 / n * f1;
    }
    Ok(total)
}

/// Recall of every class that occurs in `labels`, in class order.
pub fn sensitivities(predictions: &[usize], labels: &[usize]) -> Result<Vec<f64>> {
    let l = n_classes_of(predictions, labels);
    let cm = confusion_matrix(predictions, labels, l)?;
    Ok((0..l)
        .filter_map(|c| {
            let support: usize = cm[c].iter().sum();
            (support > 0).then(|| cm[c][c] as f64 / support as f64)
        })
        .collect())
}

pub fn geometric_mean(values: &[f64]) -> f64 {
    if values.is_empty() || values.iter().any(|&v| v <= 0.0) {
        return 0.0;
    }
    (values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp()
}

/// Geometric mean of the per-class recalls over the classes in `labels`.
pub fn g_mean(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    Ok(geometric_mean(&sensitivities(predictions, labels)?))
}

pub fn evaluate(metric: Metric, predictions: &[usize], scores: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    match metric {
        Metric::Auc => auc_multiclass(scores, labels),
        Metric::FMeasure => f_measure_weighted(predictions, labels),
        Metric::GMean => g_mean(predictions, labels),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(fractional_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
        assert_eq!(fractional_ranks(&[1.0, 1.0, 5.0, 1.0]), vec![2.0, 2.0, 4.0, 2.0]);
    }

    #[test]
    fn auc_edges() {
        let scores = vec![vec![0.9, 0.1], vec![0.8, 0.2], vec![0.3, 0.7], vec![0.1, 0.9]];
        assert_eq!(auc_multiclass(&scores, &[0, 0, 1, 1]).unwrap(), 1.0);
        let flat = vec![vec![1.0 / 3.0; 3]; 6];
        assert_eq!(auc_multiclass(&flat, &[0, 1, 2, 0, 1, 2]).unwrap(), 0.5);
        assert_eq!(auc_multiclass(&flat, &[0; 6]), Err(Error::TooFewClasses));
    }

    #[test]
    fn weighted_f_example() {
        let labels: Vec<usize> = (0..100).map(|i| usize::from(i >= 90)).collect();
        let preds = vec![0; 100];
        // class 0 F1 = 2·0.9·1/1.9, class 1 F1 = 0
        let expected = 0.9 * (2.0 * 0.9 / 1.9);
        assert_abs_diff_eq!(f_measure_weighted(&preds, &labels).unwrap(), expected, epsilon = 1e-12);
        assert_eq!(f_measure_weighted(&labels, &labels).unwrap(), 1.0);
    }

    #[test]
    fn gmean_examples() {
        assert_abs_diff_eq!(geometric_mean(&[1.0, 0.5, 0.8]), 0.4f64.powf(1.0 / 3.0), epsilon = 1e-12);
        assert_abs_diff_eq!(geometric_mean(&[1.0, 0.5, 0.8]), 0.7368, epsilon = 1e-4);
        assert_eq!(g_mean(&[0, 0, 0], &[0, 1, 1]).unwrap(), 0.0);
        assert_eq!(g_mean(&[2, 1, 0], &[2, 1, 0]).unwrap(), 1.0);
    }

    #[test]
    fn metric_names() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
    }

    proptest! {
        #[test]
        fn metrics_ignore_sample_order(
            pairs in proptest::collection::vec((0usize..3, 0usize..3, 0.0f64..1.0), 4..40),
            shift in 0usize..40,
        ) {
            let labels: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let preds: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let scores: Vec<Vec<f64>> = pairs.iter().map(|p| vec![p.2, 1.0 - p.2, 0.5]).collect();
            let rot = |v: &[_]| -> Vec<_> { let mut w = v.to_vec(); let k = shift % w.len(); w.rotate_left(k); w };
            let (rl, rp) = (rot(&labels), rot(&preds));
            let rs: Vec<Vec<f64>> = { let mut w = scores.clone(); let k = shift % w.len(); w.rotate_left(k); w };
            prop_assert!((f_measure_weighted(&preds, &labels).unwrap() - f_measure_weighted(&rp, &rl).unwrap()).abs() < 1e-12);
            prop_assert!((g_mean(&preds, &labels).unwrap() - g_mean(&rp, &rl).unwrap()).abs() < 1e-12);
            if let Ok(a) = auc_multiclass(&scores, &labels) {
                prop_assert!((a - auc_multiclass(&rs, &rl).unwrap()).abs() < 1e-12);
            }
        }

        #[test]
        fn gmean_bounds(sens in proptest::collection::vec(0.0f64..=1.0, 1..6)) {
            let g = geometric_mean(&sens);
            let max = sens.iter().copied().fold(0.0, f64::max);
            prop_assert!(g >= 0.0 && g <= max + 1e-12);
            prop_assert_eq!(g == 0.0, sens.contains(&0.0));
        }
    }
}
