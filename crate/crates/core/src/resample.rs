//! Random under-sampling, SMOTE, RAMO and Random Balance, plus the
//! multi-class rules that turn them into the six ensemble variants.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use log::warn;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::util::{argmax, k_nearest, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResampleVariant {
    /// Plain bagging.
    Ba,
    /// RAMO doubling every minority class.
    BaRm100,
    /// RAMO up to the majority count.
    BaRm,
    BaSm100,
    BaSm,
    BaRb,
}

impl ResampleVariant {
    pub const ALL: [ResampleVariant; 6] = [
        ResampleVariant::Ba,
        ResampleVariant::BaRm100,
        ResampleVariant::BaRm,
        ResampleVariant::BaSm100,
        ResampleVariant::BaSm,
        ResampleVariant::BaRb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ResampleVariant::Ba => "Ba",
            ResampleVariant::BaRm100 => "Ba-RM100",
            ResampleVariant::BaRm => "Ba-RM",
            ResampleVariant::BaSm100 => "Ba-SM100",
            ResampleVariant::BaSm => "Ba-SM",
            ResampleVariant::BaRb => "Ba-RB",
        }
    }
}

impl fmt::Display for ResampleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ResampleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ResampleVariant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamoConfig {
    pub k1: usize,
    pub k2: usize,
    pub alpha: f64,
}

impl Default for RamoConfig {
    fn default() -> Self {
        RamoConfig { k1: 10, k2: 5, alpha: 0.3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResampleParams {
    pub smote_k: usize,
    pub ramo: RamoConfig,
}

impl Default for ResampleParams {
    fn default() -> Self {
        ResampleParams { smote_k: 5, ramo: RamoConfig::default() }
    }
}

/// Where a synthetic row came from: `seed + gap * (neighbor - seed)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: usize,
    pub neighbor: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SyntheticBatch {
    pub class: usize,
    pub rows: Vec<Vec<f64>>,
    pub provenance: Vec<Provenance>,
}

impl SyntheticBatch {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn remap(mut self, members: &[usize], class: usize) -> Self {
        for p in &mut self.provenance {
            p.seed = members[p.seed];
            p.neighbor = members[p.neighbor];
        }
        self.class = class;
        self
    }

    /// `class,seed,neighbor,gap,x0,x1,...` with a header line.
    pub fn provenance_csv(&self) -> String {
        let d = self.rows.first().map_or(0, Vec::len);
        let mut out = String::from("class,seed,neighbor,gap");
        for j in 0..d {
            let _ = write!(out, ",x{j}");
        }
        out.push('\n');
        for (row, p) in self.rows.iter().zip(&self.provenance) {
            let _ = write!(out, "{},{},{},{:?}", self.class, p.seed, p.neighbor, p.gap);
            for v in row {
                let _ = write!(out, ",{v:?}");
            }
            out.push('\n');
        }
        out
    }
}

/// Uniform sample of `target` distinct entries of `indices`, in ascending order.
pub fn rus(indices: &[usize], target: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    if target > indices.len() {
        return Err(Error::SampleSize { target, available: indices.len() });
    }
    let mut picked: Vec<usize> = sample(rng, indices.len(), target).into_iter().map(|p| indices[p]).collect();
    picked.sort_unstable();
    Ok(picked)
}

fn neighbour_lists(rows: &[Vec<f64>], k: usize) -> Vec<Vec<usize>> {
    (0..rows.len())
        .map(|i| {
            k_nearest(rows.iter().map(Vec::as_slice), &rows[i], k, Some(i))
                .into_iter()
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

fn interpolate(rows: &[Vec<f64>], seed: usize, neighbor: usize, rng: &mut Rng) -> (Vec<f64>, Provenance) {
    let gap: f64 = rng.random();
    let x = &rows[seed];
    let row = x.iter().zip(&rows[neighbor]).map(|(a, b)| a + gap * (b - a)).collect();
    (row, Provenance { seed, neighbor, gap })
}

/// Exactly `count` SMOTE rows over `rows`: every row seeds `count / T`
/// samples and a random subset of `count % T` rows seeds one more.
pub fn smote_count(rows: &[Vec<f64>], count: usize, k: usize, rng: &mut Rng) -> Result<SyntheticBatch> {
    if count == 0 {
        return Ok(SyntheticBatch::default());
    }
    let t = rows.len();
    if t < 2 {
        return Err(Error::SmoteSeeds(t));
    }
    let k = k.clamp(1, t - 1);
    let neighbours = neighbour_lists(rows, k);
    let mut repeats = vec![count / t; t];
    for p in sample(rng, t, count % t) {
        repeats[p] += 1;
    }
    let mut batch = SyntheticBatch::default();
    for (seed, &r) in repeats.iter().enumerate() {
        for _ in 0..r {
            let neighbor = neighbours[seed][rng.random_range(0..k)];
            let (row, p) = interpolate(rows, seed, neighbor, rng);
            batch.rows.push(row);
            batch.provenance.push(p);
        }
    }
    Ok(batch)
}

/// SMOTE with oversampling amount `n_percent`: `floor(N/100)·T` rows, or one
/// row for each of `N·T/100` random seeds when `N < 100`.
pub fn smote(rows: &[Vec<f64>], n_percent: usize, k: usize, rng: &mut Rng) -> Result<SyntheticBatch> {
    let t = rows.len();
    let count = if n_percent < 100 { n_percent * t / 100 } else { (n_percent / 100) * t };
    if count > 0 && t < 2 {
        return Err(Error::SmoteSeeds(t));
    }
    smote_count(rows, count, k, rng)
}

pub fn ramo_weight(m: usize, alpha: f64) -> f64 {
    1.0 / (1.0 + (-alpha * m as f64).exp())
}

/// RAMO weight of each row in `members` (all labelled `class`), counting
/// other-class rows among its `k1` nearest neighbours in `data`.
pub fn ramo_weights(data: &Dataset, members: &[usize], class: usize, k1: usize, alpha: f64) -> Vec<f64> {
    members
        .iter()
        .map(|&i| {
            let m = k_nearest(data.rows(), data.row(i), k1, Some(i))
                .into_iter()
                .filter(|&(j, _)| data.labels()[j] != class)
                .count();
            ramo_weight(m, alpha)
        })
        .collect()
}

/// `amount` RAMO rows for `class`: seeds drawn with replacement in
/// proportion to their weights, one SMOTE step each.
pub fn ramo(data: &Dataset, class: usize, amount: usize, config: &RamoConfig, rng: &mut Rng) -> Result<SyntheticBatch> {
    if amount == 0 {
        return Ok(SyntheticBatch { class, ..Default::default() });
    }
    let members = data.class_indices(class);
    if members.len() < 2 {
        return Err(Error::SmoteSeeds(members.len()));
    }
    let weights = ramo_weights(data, &members, class, config.k1, config.alpha);
    let rows: Vec<Vec<f64>> = members.iter().map(|&i| data.row(i).to_vec()).collect();
    let k = config.k2.clamp(1, rows.len() - 1);
    let neighbours = neighbour_lists(&rows, k);
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::Invalid(e.to_string()))?;
    let mut batch = SyntheticBatch::default();
    for _ in 0..amount {
        let seed = dist.sample(rng);
        let neighbor = neighbours[seed][rng.random_range(0..k)];
        let (row, p) = interpolate(&rows, seed, neighbor, rng);
        batch.rows.push(row);
        batch.provenance.push(p);
    }
    Ok(batch.remap(&members, class))
}

fn smote_class(data: &Dataset, class: usize, amount: usize, k: usize, rng: &mut Rng) -> Result<SyntheticBatch> {
    let members = data.class_indices(class);
    let rows: Vec<Vec<f64>> = members.iter().map(|&i| data.row(i).to_vec()).collect();
    Ok(smote_count(&rows, amount, k, rng)?.remap(&members, class))
}

/// A resampled view of a dataset: retained original rows plus synthetic rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Resampled {
    /// Indices of retained input rows, ascending.
    pub kept: Vec<usize>,
    pub synthetic: Vec<SyntheticBatch>,
}

impl Resampled {
    pub fn identity(n: usize) -> Self {
        Resampled { kept: (0..n).collect(), synthetic: Vec::new() }
    }

    pub fn n_synthetic(&self) -> usize {
        self.synthetic.iter().map(SyntheticBatch::len).sum()
    }

    pub fn synthetic_rows(&self) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rows = Vec::with_capacity(self.n_synthetic());
        let mut labels = Vec::with_capacity(self.n_synthetic());
        for b in &self.synthetic {
            rows.extend(b.rows.iter().cloned());
            labels.extend(std::iter::repeat_n(b.class, b.len()));
        }
        (rows, labels)
    }

    /// Retained rows followed by the synthetic rows.
    pub fn materialize(&self, data: &Dataset) -> Result<Dataset> {
        let (rows, labels) = self.synthetic_rows();
        data.subset(&self.kept).with_rows(&rows, &labels)
    }

    /// Every input row followed by the synthetic rows.
    pub fn augment(&self, data: &Dataset) -> Result<Dataset> {
        let (rows, labels) = self.synthetic_rows();
        data.with_rows(&rows, &labels)
    }
}

/// Random Balance. Classes with at least two rows get new sizes drawn at
/// random (each ≥ 2, same total); shrinking classes are under-sampled and
/// growing ones topped up with SMOTE. Smaller classes pass through untouched.
pub fn random_balance(data: &Dataset, k: usize, rng: &mut Rng) -> Result<Resampled> {
    let counts = data.class_counts();
    let eligible: Vec<usize> = (0..counts.len()).filter(|&c| counts[c] >= 2).collect();
    for c in (0..counts.len()).filter(|&c| counts[c] == 1) {
        warn!("random balance: class {c} has a single sample; left unchanged");
    }
    let total: usize = eligible.iter().map(|&c| counts[c]).sum();
    if eligible.len() < 2 || total < 4 {
        return Err(Error::RandomBalanceSize(total));
    }
    let mut order = eligible.clone();
    order.shuffle(rng);
    let mut sizes = vec![0usize; counts.len()];
    let mut remaining = total;
    for (j, &c) in order.iter().enumerate() {
        let left_after = order.len() - j - 1;
        sizes[c] = if left_after == 0 { remaining } else { rng.random_range(2..=remaining - 2 * left_after) };
        remaining -= sizes[c];
    }

    let mut out = Resampled::default();
    for c in 0..counts.len() {
        let members = data.class_indices(c);
        if !eligible.contains(&c) {
            out.kept.extend(members);
        } else if sizes[c] < counts[c] {
            out.kept.extend(rus(&members, sizes[c], rng)?);
        } else {
            out.kept.extend(&members);
            let batch = smote_class(data, c, sizes[c] - counts[c], k, rng)?;
            if !batch.is_empty() {
                out.synthetic.push(batch);
            }
        }
    }
    out.kept.sort_unstable();
    Ok(out)
}

/// Applies `variant` to `data`. The largest class (lowest id on ties) is
/// the majority; every other class is oversampled on its own.
pub fn apply_multiclass(data: &Dataset, variant: ResampleVariant, params: &ResampleParams, rng: &mut Rng) -> Result<Resampled> {
    let n = data.n_samples();
    match variant {
        ResampleVariant::Ba => return Ok(Resampled::identity(n)),
        ResampleVariant::BaRb => {
            return match random_balance(data, params.smote_k, rng) {
                Err(Error::RandomBalanceSize(n)) => {
                    warn!("random balance: only {n} samples in classes of size >= 2; left unchanged");
                    Ok(Resampled::identity(data.n_samples()))
                }
                other => other,
            };
        }
        _ => {}
    }
    let counts = data.class_counts();
    let majority = argmax(&counts);
    let maj = counts[majority];
    let mut out = Resampled::identity(n);
    for c in 0..counts.len() {
        let n_c = counts[c];
        if c == majority || n_c == 0 || n_c >= maj {
            continue;
        }
        if n_c < 2 {
            warn!("{variant}: class {c} has a single sample; not oversampled");
            continue;
        }
        let amount = match variant {
            ResampleVariant::BaSm | ResampleVariant::BaRm => maj - n_c,
            _ => n_c.min(maj - n_c),
        };
        let batch = match variant {
            ResampleVariant::BaSm | ResampleVariant::BaSm100 => smote_class(data, c, amount, params.smote_k, rng)?,
            _ => ramo(data, c, amount, &params.ramo, rng)?,
        };
        out.synthetic.push(batch);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rng_from_seed;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn blobs(counts: &[usize], seed: u64) -> Dataset {
        let mut rng = rng_from_seed(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (c, &n) in counts.iter().enumerate() {
            for _ in 0..n {
                rows.push(vec![c as f64 + rng.random::<f64>(), rng.random::<f64>() * 3.0]);
                labels.push(c);
            }
        }
        let names = (0..counts.len()).map(|c| c.to_string()).collect();
        Dataset::from_rows("blobs", &rows, labels, names).unwrap()
    }

    fn counts_after(data: &Dataset, r: &Resampled) -> Vec<usize> {
        r.materialize(data).unwrap().class_counts()
    }

    #[test]
    fn variant_names_round_trip() {
        for v in ResampleVariant::ALL {
            assert_eq!(v.name().parse::<ResampleVariant>().unwrap(), v);
        }
        assert!("Ba-XX".parse::<ResampleVariant>().is_err());
    }

    #[test]
    fn rus_cases() {
        let idx: Vec<usize> = (0..10).collect();
        let mut rng = rng_from_seed(1);
        assert_eq!(rus(&idx, 10, &mut rng).unwrap(), idx);
        let four = rus(&idx, 4, &mut rng).unwrap();
        assert_eq!(four.len(), 4);
        assert!(four.windows(2).all(|w| w[0] < w[1]));
        assert!(rus(&idx, 0, &mut rng).unwrap().is_empty());
        assert_eq!(rus(&idx, 11, &mut rng), Err(Error::SampleSize { target: 11, available: 10 }));
    }

    #[test]
    fn smote_sizes() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let mut rng = rng_from_seed(2);
        assert_eq!(smote(&rows, 100, 5, &mut rng).unwrap().len(), 5);
        assert_eq!(smote(&rows, 300, 5, &mut rng).unwrap().len(), 15);
        assert_eq!(smote(&rows[..4], 50, 5, &mut rng).unwrap().len(), 2);
        assert_eq!(smote(&rows[..1], 100, 5, &mut rng), Err(Error::SmoteSeeds(1)));
    }

    #[test]
    fn smote_on_a_segment() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let mut rng = rng_from_seed(3);
        let b = smote_count(&rows, 1000, 1, &mut rng).unwrap();
        for r in &b.rows {
            assert_eq!(r[0], r[1]);
            assert!((0.0..=1.0).contains(&r[0]));
        }
    }

    #[test]
    fn ramo_weight_values() {
        assert_eq!(ramo_weight(0, 0.3), 0.5);
        assert_abs_diff_eq!(ramo_weight(10, 0.3), 1.0 / (1.0 + (-3.0f64).exp()), epsilon = 1e-15);
        assert!((0..20).all(|m| ramo_weight(m + 1, 0.3) > ramo_weight(m, 0.3)));
    }

    #[test]
    fn ramo_prefers_border_seeds() {
        // minority row 0 sits inside the majority cloud, row 1 far away
        let mut rows = vec![vec![0.0], vec![100.0], vec![101.0]];
        let mut labels = vec![1, 1, 1];
        for i in 0..10 {
            rows.push(vec![0.1 * (i as f64 + 1.0)]);
            labels.push(0);
        }
        let data = Dataset::from_rows("r", &rows, labels, vec!["maj".into(), "min".into()]).unwrap();
        let cfg = RamoConfig { k1: 10, k2: 1, alpha: 0.3 };
        let w = ramo_weights(&data, &data.class_indices(1), 1, cfg.k1, cfg.alpha);
        assert_abs_diff_eq!(w[0], ramo_weight(10, 0.3), epsilon = 1e-12);
        assert!(w[0] > w[1]);

        let b = ramo(&data, 1, 10000, &cfg, &mut rng_from_seed(4)).unwrap();
        let freq0 = b.provenance.iter().filter(|p| p.seed == 0).count() as f64 / 10000.0;
        let expected = w[0] / w.iter().sum::<f64>();
        assert!((freq0 - expected).abs() < 0.02, "{freq0} vs {expected}");
        assert!(ramo(&data, 1, 0, &cfg, &mut rng_from_seed(4)).unwrap().is_empty());
    }

    #[test]
    fn multiclass_examples() {
        let params = ResampleParams::default();
        let data = blobs(&[50, 20, 10], 5);
        let mut rng = rng_from_seed(6);
        let sm = apply_multiclass(&data, ResampleVariant::BaSm, &params, &mut rng).unwrap();
        assert_eq!(counts_after(&data, &sm), vec![50, 50, 50]);
        let sm100 = apply_multiclass(&data, ResampleVariant::BaSm100, &params, &mut rng).unwrap();
        assert_eq!(counts_after(&data, &sm100), vec![50, 40, 20]);

        let data = blobs(&[50, 30, 5], 7);
        let rm100 = apply_multiclass(&data, ResampleVariant::BaRm100, &params, &mut rng).unwrap();
        assert_eq!(counts_after(&data, &rm100), vec![50, 50, 10]);
        let rm = apply_multiclass(&data, ResampleVariant::BaRm, &params, &mut rng).unwrap();
        assert_eq!(counts_after(&data, &rm), vec![50, 50, 50]);

        let ba = apply_multiclass(&data, ResampleVariant::Ba, &params, &mut rng).unwrap();
        assert_eq!(ba.materialize(&data).unwrap(), data);
    }

    #[test]
    fn singleton_minority_is_skipped() {
        let data = blobs(&[10, 1, 4], 8);
        let r = apply_multiclass(&data, ResampleVariant::BaSm, &ResampleParams::default(), &mut rng_from_seed(9)).unwrap();
        assert_eq!(counts_after(&data, &r), vec![10, 1, 10]);
    }

    #[test]
    fn random_balance_boundaries() {
        assert_eq!(
            random_balance(&blobs(&[2, 1], 1), 5, &mut rng_from_seed(1)),
            Err(Error::RandomBalanceSize(2))
        );
        let tiny = blobs(&[6, 1], 1);
        let r = apply_multiclass(&tiny, ResampleVariant::BaRb, &ResampleParams::default(), &mut rng_from_seed(1)).unwrap();
        assert_eq!(r, Resampled::identity(7));
        let data = blobs(&[95, 5], 10);
        let mut seen_extreme = false;
        for s in 0..400 {
            let r = random_balance(&data, 5, &mut rng_from_seed(s)).unwrap();
            let c = counts_after(&data, &r);
            assert_eq!(c.iter().sum::<usize>(), 100);
            assert!(c.iter().all(|&n| n >= 2));
            seen_extreme |= c[0] == 2 || c[1] == 2;
        }
        assert!(seen_extreme);
    }

    #[test]
    fn provenance_dump_has_one_line_per_row() {
        let rows: Vec<Vec<f64>> = (0..3).map(|i| vec![i as f64]).collect();
        let b = smote_count(&rows, 4, 2, &mut rng_from_seed(0)).unwrap();
        let csv = b.provenance_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("class,seed,neighbor,gap,x0"));
    }

    fn check_synthetic_geometry(data: &Dataset, r: &Resampled) -> std::result::Result<(), TestCaseError> {
        for b in &r.synthetic {
            let members = data.class_indices(b.class);
            for (row, p) in b.rows.iter().zip(&b.provenance) {
                prop_assert_eq!(data.labels()[p.seed], b.class);
                prop_assert_eq!(data.labels()[p.neighbor], b.class);
                prop_assert!((0.0..=1.0).contains(&p.gap));
                for j in 0..row.len() {
                    let (a, c) = (data.row(p.seed)[j], data.row(p.neighbor)[j]);
                    prop_assert!((row[j] - (a + p.gap * (c - a))).abs() < 1e-12);
                    let lo = members.iter().map(|&i| data.row(i)[j]).fold(f64::INFINITY, f64::min);
                    let hi = members.iter().map(|&i| data.row(i)[j]).fold(f64::NEG_INFINITY, f64::max);
                    prop_assert!(row[j] >= lo - 1e-12 && row[j] <= hi + 1e-12);
                }
            }
        }
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sm_equalizes(counts in proptest::collection::vec(2usize..30, 2..5), seed in any::<u64>()) {
            let data = blobs(&counts, seed);
            let r = apply_multiclass(&data, ResampleVariant::BaSm, &ResampleParams::default(), &mut rng_from_seed(seed)).unwrap();
            let after = counts_after(&data, &r);
            let maj = *counts.iter().max().unwrap();
            prop_assert!(after.iter().all(|&c| c == maj));
            check_synthetic_geometry(&data, &r)?;
        }

        #[test]
        fn oversampling_keeps_majority_rows(counts in proptest::collection::vec(2usize..30, 2..5), seed in any::<u64>(), v in 1usize..5) {
            let data = blobs(&counts, seed);
            let variant = ResampleVariant::ALL[v];
            let r = apply_multiclass(&data, variant, &ResampleParams::default(), &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(&r.kept, &(0..data.n_samples()).collect::<Vec<_>>());
            let majority = argmax(&counts);
            prop_assert!(r.synthetic.iter().all(|b| b.class != majority));
            check_synthetic_geometry(&data, &r)?;
        }

        #[test]
        fn random_balance_preserves_size(counts in proptest::collection::vec(2usize..40, 2..5), seed in any::<u64>()) {
            let data = blobs(&counts, seed);
            let r = random_balance(&data, 5, &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(r.kept.len() + r.n_synthetic(), data.n_samples());
            check_synthetic_geometry(&data, &r)?;
        }

        #[test]
        fn resampling_is_deterministic(seed in any::<u64>(), v in 0usize..6) {
            let data = blobs(&[20, 8, 5], 3);
            let variant = ResampleVariant::ALL[v];
            let a = apply_multiclass(&data, variant, &ResampleParams::default(), &mut rng_from_seed(seed)).unwrap();
            let b = apply_multiclass(&data, variant, &ResampleParams::default(), &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
