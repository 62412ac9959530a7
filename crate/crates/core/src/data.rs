//! Datasets, Keel/CSV ingestion, nominal encoding, z-scoring and the 5×2
//! stratified split.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use log::{info, warn};
use ndarray::Array2;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttributeSpec {
    Numeric { name: String },
    /// Column values are category codes `0..categories.len()`.
    Nominal { name: String, categories: Vec<String> },
}

impl AttributeSpec {
    pub fn name(&self) -> &str {
        match self {
            AttributeSpec::Numeric { name } | AttributeSpec::Nominal { name, .. } => name,
        }
    }

    pub fn is_nominal(&self) -> bool {
        matches!(self, AttributeSpec::Nominal { .. })
    }
}

/// Feature matrix plus integer class labels in `0..n_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Array2<f64>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    attribute_specs: Vec<AttributeSpec>,
}

impl Dataset {
    /// Builds a dataset, checking shapes and label range. Subsets of a
    /// dataset may miss some classes; use [`Dataset::check_all_classes_present`]
    /// where every class must appear.
    pub fn new(
        name: impl Into<String>,
        features: Array2<f64>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        attribute_specs: Vec<AttributeSpec>,
    ) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::LengthMismatch(features.nrows(), labels.len()));
        }
        if attribute_specs.len() != features.ncols() {
            return Err(Error::LengthMismatch(attribute_specs.len(), features.ncols()));
        }
        if class_names.len() < 2 {
            return Err(Error::TooFewClasses);
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::Invalid(format!("label {bad} outside 0..{}", class_names.len())));
        }
        let features = if features.is_standard_layout() {
            features
        } else {
            features.as_standard_layout().into_owned()
        };
        Ok(Dataset {
            name: name.into(),
            features,
            labels,
            class_names,
            attribute_specs,
        })
    }

    /// Convenience constructor for all-numeric data given as rows.
    pub fn from_rows(
        name: impl Into<String>,
        rows: &[Vec<f64>],
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(rows.len() * n_features);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_features {
                return Err(Error::Arity { row: i, expected: n_features, found: r.len() });
            }
            flat.extend_from_slice(r);
        }
        let features = Array2::from_shape_vec((rows.len(), n_features), flat)
            .map_err(|e| Error::Invalid(e.to_string()))?;
        let specs = (0..n_features)
            .map(|j| AttributeSpec::Numeric { name: format!("x{j}") })
            .collect();
        Dataset::new(name, features, labels, class_names, specs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn attribute_specs(&self) -> &[AttributeSpec] {
        &self.attribute_specs
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.features
            .row(i)
            .to_slice()
            .expect("features are kept in standard layout")
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_samples()).map(move |i| self.row(i))
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Indices of the rows labelled `class`.
    pub fn class_indices(&self, class: usize) -> Vec<usize> {
        (0..self.n_samples()).filter(|&i| self.labels[i] == class).collect()
    }

    pub fn check_all_classes_present(&self) -> Result<()> {
        if let Some(c) = self.class_counts().iter().position(|&n| n == 0) {
            return Err(Error::Invalid(format!("class `{}` has no samples", self.class_names[c])));
        }
        Ok(())
    }

    pub fn imbalance_profile(&self) -> ImbalanceProfile {
        ImbalanceProfile::from_counts(self.class_counts())
    }

    /// Rows at `indices` (repeats allowed), keeping class and attribute metadata.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let features = self.features.select(ndarray::Axis(0), indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Dataset {
            name: self.name.clone(),
            features,
            labels,
            class_names: self.class_names.clone(),
            attribute_specs: self.attribute_specs.clone(),
        }
    }

    /// A copy of this dataset with extra rows appended.
    pub fn with_rows(&self, rows: &[Vec<f64>], labels: &[usize]) -> Result<Dataset> {
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch(rows.len(), labels.len()));
        }
        let d = self.n_features();
        let mut flat = Vec::with_capacity((self.n_samples() + rows.len()) * d);
        flat.extend(self.features.iter().copied());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::Arity { row: i, expected: d, found: r.len() });
            }
            flat.extend_from_slice(r);
        }
        let features = Array2::from_shape_vec((self.n_samples() + rows.len(), d), flat)
            .map_err(|e| Error::Invalid(e.to_string()))?;
        let mut all_labels = self.labels.clone();
        all_labels.extend_from_slice(labels);
        Dataset::new(
            self.name.clone(),
            features,
            all_labels,
            self.class_names.clone(),
            self.attribute_specs.clone(),
        )
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Dataset {
        self.name = name.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceProfile {
    pub class_counts: Vec<usize>,
    pub majority_class: usize,
    /// Largest over smallest class count. Empty classes are ignored.
    pub imbalance_ratio: f64,
}

impl ImbalanceProfile {
    pub fn from_counts(class_counts: Vec<usize>) -> Self {
        let majority_class = crate::util::argmax(&class_counts);
        let max = class_counts[majority_class] as f64;
        let min = class_counts.iter().copied().filter(|&c| c > 0).min().unwrap_or(0) as f64;
        let imbalance_ratio = if min > 0.0 { max / min } else { f64::INFINITY };
        ImbalanceProfile { class_counts, majority_class, imbalance_ratio }
    }
}

fn is_missing(cell: &str) -> bool {
    cell == "?" || cell.eq_ignore_ascii_case("<null>")
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('\'')
        .and_then(|t| t.strip_suffix('\''))
        .or_else(|| s.strip_prefix('"').and_then(|t| t.strip_suffix('"')))
        .unwrap_or(s)
}

fn parse_attribute(line_no: usize, rest: &str) -> Result<AttributeSpec> {
    let rest = rest.trim();
    if let Some(open) = rest.find('{') {
        let close = rest
            .rfind('}')
            .ok_or_else(|| Error::Parse { line: line_no, msg: "unterminated category list".into() })?;
        let name = unquote(&rest[..open]).to_string();
        let categories: Vec<String> = rest[open + 1..close]
            .split(',')
            .map(|c| unquote(c).to_string())
            .filter(|c| !c.is_empty())
            .collect();
        if name.is_empty() || categories.is_empty() {
            return Err(Error::Parse { line: line_no, msg: "malformed nominal attribute".into() });
        }
        return Ok(AttributeSpec::Nominal { name, categories });
    }
    let mut parts = rest.split_whitespace();
    let name = parts
        .next()
        .ok_or_else(|| Error::Parse { line: line_no, msg: "attribute without a name".into() })?;
    let kind = parts.next().unwrap_or("real").to_ascii_lowercase();
    let kind = kind.split('[').next().unwrap_or("");
    match kind {
        "real" | "integer" | "numeric" => Ok(AttributeSpec::Numeric { name: unquote(name).to_string() }),
        other => Err(Error::Parse { line: line_no, msg: format!("unsupported attribute type `{other}`") }),
    }
}

fn name_list(rest: &str) -> Vec<String> {
    rest.split(',').map(|s| unquote(s).to_string()).filter(|s| !s.is_empty()).collect()
}

/// Sorts class tokens numerically when they all parse as numbers, otherwise
/// lexicographically.
fn ordered_class_names(values: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut distinct: Vec<String> = values.into_iter().collect();
    distinct.sort();
    distinct.dedup();
    if distinct.iter().all(|v| v.parse::<f64>().is_ok()) {
        distinct.sort_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
    }
    distinct
}

/// Drops declared classes that never occur, keeping declaration order.
fn compact_classes(labels: &mut [usize], class_names: Vec<String>) -> Vec<String> {
    let mut used = vec![false; class_names.len()];
    for &l in labels.iter() {
        used[l] = true;
    }
    if used.iter().all(|&u| u) {
        return class_names;
    }
    let mut remap = vec![usize::MAX; class_names.len()];
    let mut kept = Vec::new();
    for (old, name) in class_names.into_iter().enumerate() {
        if used[old] {
            remap[old] = kept.len();
            kept.push(name);
        } else {
            info!("declared class `{name}` has no samples; dropped");
        }
    }
    for l in labels.iter_mut() {
        *l = remap[*l];
    }
    kept
}

/// Parses a Keel `.dat` file. Nominal inputs are kept as category codes
/// (see [`encode_nominals`]); the output attribute becomes the label.
pub fn parse_keel(text: &str) -> Result<Dataset> {
    let mut relation = String::from("dataset");
    let mut attributes: Vec<AttributeSpec> = Vec::new();
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut data_start = None;

    let lines: Vec<&str> = text.lines().collect();
    for (i, raw) in lines.iter().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            relation = unquote(&line["@relation".len()..]).to_string();
        } else if lower.starts_with("@attribute") {
            attributes.push(parse_attribute(i + 1, &line["@attribute".len()..])?);
        } else if lower.starts_with("@inputs") {
            inputs = Some(name_list(&line["@inputs".len()..]));
        } else if lower.starts_with("@outputs") || lower.starts_with("@output") {
            let skip = if lower.starts_with("@outputs") { "@outputs".len() } else { "@output".len() };
            outputs = Some(name_list(&line[skip..]));
        } else if lower.starts_with("@data") {
            data_start = Some(i + 1);
            break;
        } else if line.starts_with('@') {
            return Err(Error::Parse { line: i + 1, msg: format!("unknown directive `{line}`") });
        } else {
            return Err(Error::MissingData);
        }
    }
    let data_start = data_start.ok_or(Error::MissingData)?;
    if attributes.len() < 2 {
        return Err(Error::Parse { line: 0, msg: "need at least one input and one output attribute".into() });
    }

    let find = |name: &str| attributes.iter().position(|a| a.name() == name);
    let class_col = match outputs.as_ref().and_then(|o| o.first()) {
        Some(name) => find(name)
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("unknown output attribute `{name}`") })?,
        None => attributes.len() - 1,
    };
    let input_cols: Vec<usize> = match &inputs {
        Some(names) => names
            .iter()
            .map(|n| find(n).ok_or_else(|| Error::Parse { line: 0, msg: format!("unknown input attribute `{n}`") }))
            .collect::<Result<_>>()?,
        None => (0..attributes.len()).filter(|&c| c != class_col).collect(),
    };

    let mut flat = Vec::new();
    let mut raw_classes = Vec::new();
    let mut dropped = 0usize;
    for (offset, raw) in lines[data_start..].iter().enumerate() {
        let line_no = data_start + offset + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != attributes.len() {
            return Err(Error::Arity { row: line_no, expected: attributes.len(), found: cells.len() });
        }
        if cells.iter().any(|c| is_missing(c)) {
            dropped += 1;
            continue;
        }
        for &c in &input_cols {
            let value = match &attributes[c] {
                AttributeSpec::Numeric { .. } => cells[c]
                    .parse::<f64>()
                    .map_err(|_| Error::NonNumeric { column: c, value: cells[c].to_string() })?,
                AttributeSpec::Nominal { name, categories } => {
                    let cell = unquote(cells[c]);
                    categories.iter().position(|k| k == cell).ok_or_else(|| Error::UnknownCategory {
                        attribute: name.clone(),
                        value: cell.to_string(),
                    })? as f64
                }
            };
            flat.push(value);
        }
        raw_classes.push(unquote(cells[class_col]).to_string());
    }
    if dropped > 0 {
        warn!("{relation}: dropped {dropped} rows with missing values");
    }
    if raw_classes.is_empty() {
        return Err(Error::EmptyData);
    }

    let (class_names, mut labels) = match &attributes[class_col] {
        AttributeSpec::Nominal { name, categories } => {
            let labels = raw_classes
                .iter()
                .map(|v| {
                    categories.iter().position(|k| k == v).ok_or_else(|| Error::UnknownCategory {
                        attribute: name.clone(),
                        value: v.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (categories.clone(), labels)
        }
        AttributeSpec::Numeric { .. } => {
            let names = ordered_class_names(raw_classes.iter().cloned());
            let labels = raw_classes.iter().map(|v| names.iter().position(|n| n == v).unwrap()).collect();
            (names, labels)
        }
    };
    let class_names = compact_classes(&mut labels, class_names);
    if class_names.len() < 2 {
        return Err(Error::TooFewClasses);
    }

    let specs: Vec<AttributeSpec> = input_cols.iter().map(|&c| attributes[c].clone()).collect();
    let features = Array2::from_shape_vec((labels.len(), specs.len()), flat)
        .map_err(|e| Error::Invalid(e.to_string()))?;
    Dataset::new(relation, features, labels, class_names, specs)
}

/// Parses a comma-separated table. All columns other than `label_column` must
/// be numeric; a first row with a non-numeric feature cell is a header.
pub fn parse_csv(text: &str, label_column: usize) -> Result<Dataset> {
    let rows: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').map(str::trim).collect()))
        .collect();
    let Some((_, first)) = rows.first() else {
        return Err(Error::EmptyData);
    };
    let width = first.len();
    if label_column >= width {
        return Err(Error::Invalid(format!("label column {label_column} out of range for width {width}")));
    }
    let is_header = first
        .iter()
        .enumerate()
        .any(|(c, v)| c != label_column && !is_missing(v) && v.parse::<f64>().is_err());
    let names: Vec<String> = if is_header {
        first.iter().map(|s| unquote(s).to_string()).collect()
    } else {
        (0..width).map(|c| format!("x{c}")).collect()
    };
    let body = if is_header { &rows[1..] } else { &rows[..] };

    let mut flat = Vec::new();
    let mut raw_classes = Vec::new();
    let mut dropped = 0usize;
    for (line_no, cells) in body {
        if cells.len() != width {
            return Err(Error::Arity { row: *line_no, expected: width, found: cells.len() });
        }
        if cells.iter().any(|c| is_missing(c)) {
            dropped += 1;
            continue;
        }
        for (c, cell) in cells.iter().enumerate() {
            if c == label_column {
                continue;
            }
            flat.push(
                cell.parse::<f64>()
                    .map_err(|_| Error::NonNumeric { column: c, value: cell.to_string() })?,
            );
        }
        raw_classes.push(unquote(cells[label_column]).to_string());
    }
    if dropped > 0 {
        warn!("csv: dropped {dropped} rows with missing values");
    }
    if raw_classes.is_empty() {
        return Err(Error::EmptyData);
    }
    let class_names = ordered_class_names(raw_classes.iter().cloned());
    if class_names.len() < 2 {
        return Err(Error::TooFewClasses);
    }
    let labels = raw_classes
        .iter()
        .map(|v| class_names.iter().position(|n| n == v).unwrap())
        .collect::<Vec<_>>();
    let specs: Vec<AttributeSpec> = names
        .into_iter()
        .enumerate()
        .filter(|(c, _)| *c != label_column)
        .map(|(_, name)| AttributeSpec::Numeric { name })
        .collect();
    let features = Array2::from_shape_vec((labels.len(), specs.len()), flat)
        .map_err(|e| Error::Invalid(e.to_string()))?;
    Dataset::new("csv", features, labels, class_names, specs)
}

/// Replaces every nominal column with one indicator column per category.
pub fn encode_nominals(dataset: &Dataset) -> Dataset {
    if !dataset.attribute_specs.iter().any(AttributeSpec::is_nominal) {
        return dataset.clone();
    }
    let mut specs = Vec::new();
    for spec in &dataset.attribute_specs {
        match spec {
            AttributeSpec::Numeric { .. } => specs.push(spec.clone()),
            AttributeSpec::Nominal { name, categories } => {
                specs.extend(categories.iter().map(|c| AttributeSpec::Numeric { name: format!("{name}={c}") }))
            }
        }
    }
    let mut flat = Vec::with_capacity(dataset.n_samples() * specs.len());
    for row in dataset.rows() {
        for (value, spec) in row.iter().zip(&dataset.attribute_specs) {
            match spec {
                AttributeSpec::Numeric { .. } => flat.push(*value),
                AttributeSpec::Nominal { categories, .. } => {
                    let code = *value as usize;
                    flat.extend((0..categories.len()).map(|k| if k == code { 1.0 } else { 0.0 }));
                }
            }
        }
    }
    let features = Array2::from_shape_vec((dataset.n_samples(), specs.len()), flat)
        .expect("one-hot width matches specs");
    Dataset {
        name: dataset.name.clone(),
        features,
        labels: dataset.labels.clone(),
        class_names: dataset.class_names.clone(),
        attribute_specs: specs,
    }
}

/// Per-feature affine map fitted on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub means: Vec<f64>,
    /// Population standard deviations; 0 marks a constant feature.
    pub stds: Vec<f64>,
}

const ZERO_VARIANCE: f64 = 1e-12;

impl ScalingParams {
    pub fn fit(train: &Dataset) -> Self {
        let n = train.n_samples() as f64;
        let d = train.n_features();
        let mut means = vec![0.0; d];
        for row in train.rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; d];
        for row in train.rows() {
            for j in 0..d {
                vars[j] += (row[j] - means[j]).powi(2);
            }
        }
        let stds = vars
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s < ZERO_VARIANCE { 0.0 } else { s }
            })
            .collect();
        ScalingParams { means, stds }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| if *s == 0.0 { 0.0 } else { (v - m) / s })
            .collect()
    }

    pub fn apply(&self, dataset: &Dataset) -> Dataset {
        let mut out = dataset.clone();
        for (j, mut col) in out.features.columns_mut().into_iter().enumerate() {
            let (m, s) = (self.means[j], self.stds[j]);
            col.mapv_inplace(|v| if s == 0.0 { 0.0 } else { (v - m) / s });
        }
        out
    }

    /// Plain-text `key = value` form, one line per parameter.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n_features = {}", self.means.len());
        for (j, (m, s)) in self.means.iter().zip(&self.stds).enumerate() {
            let _ = writeln!(out, "mean.{j} = {m:?}");
            let _ = writeln!(out, "std.{j} = {s:?}");
        }
        out
    }

    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected key = value".into() })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let num = |k: &str| -> Result<f64> {
            kv.get(k)
                .ok_or_else(|| Error::Parse { line: 0, msg: format!("missing key `{k}`") })?
                .parse::<f64>()
                .map_err(|_| Error::Parse { line: 0, msg: format!("bad value for `{k}`") })
        };
        let d = num("n_features")? as usize;
        let mut means = Vec::with_capacity(d);
        let mut stds = Vec::with_capacity(d);
        for j in 0..d {
            means.push(num(&format!("mean.{j}"))?);
            stds.push(num(&format!("std.{j}"))?);
        }
        Ok(ScalingParams { means, stds })
    }
}

/// Z-scores `train` and applies the same map to every dataset in `others`.
pub fn standardize(train: &Dataset, others: &[Dataset]) -> (Dataset, Vec<Dataset>, ScalingParams) {
    let params = ScalingParams::fit(train);
    let scaled_train = params.apply(train);
    let scaled_others = others.iter().map(|d| params.apply(d)).collect();
    (scaled_train, scaled_others, params)
}

/// One replication of the 5×2 protocol: two disjoint folds covering all rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPair {
    pub fold_a: Vec<usize>,
    pub fold_b: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub replications: Vec<FoldPair>,
    pub seed: u64,
    /// Classes with a single sample; they always sit in fold A.
    pub singleton_classes: Vec<usize>,
}

pub const REPLICATIONS: usize = 5;

/// Five independent stratified two-fold splits.
pub fn stratified_5x2(dataset: &Dataset, seed: u64) -> SplitPlan {
    let mut rng = rng_from_seed(seed);
    let per_class: Vec<Vec<usize>> = (0..dataset.n_classes()).map(|c| dataset.class_indices(c)).collect();
    let singleton_classes: Vec<usize> = (0..dataset.n_classes()).filter(|&c| per_class[c].len() == 1).collect();
    for &c in &singleton_classes {
        warn!(
            "{}: class `{}` has a single sample; it is assigned to fold A in every replication",
            dataset.name(),
            dataset.class_names()[c]
        );
    }
    let mut replications = Vec::with_capacity(REPLICATIONS);
    for rep in 0..REPLICATIONS {
        let mut fold_a = Vec::new();
        let mut fold_b = Vec::new();
        let mut odd_seen = 0usize;
        for members in &per_class {
            let mut members = members.clone();
            members.shuffle(&mut rng);
            let n = members.len();
            let half = if n == 1 {
                1
            } else if n % 2 == 1 {
                // extra sample alternates between folds across replications
                let to_a = (rep + odd_seen).is_multiple_of(2);
                odd_seen += 1;
                if to_a { n / 2 + 1 } else { n / 2 }
            } else {
                n / 2
            };
            fold_a.extend_from_slice(&members[..half]);
            fold_b.extend_from_slice(&members[half..]);
        }
        fold_a.sort_unstable();
        fold_b.sort_unstable();
        replications.push(FoldPair { fold_a, fold_b });
    }
    SplitPlan { replications, seed, singleton_classes }
}
