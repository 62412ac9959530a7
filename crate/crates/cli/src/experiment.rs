//! The 5×2 cross-validation pipeline: standardize, grow the pool, build DSEL,
//! run every selector on the held-out fold and record the metrics.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::time::Instant;

use imbdes::data::{encode_nominals, parse_csv, parse_keel, standardize, stratified_5x2};
use imbdes::dynsel::{DynamicSelector, SelectorConfig};
use imbdes::eval::evaluate;
use imbdes::pool::{build_dsel, generate_pool, PoolConfig};
use imbdes::util::derive_seed_str;
use imbdes::{Dataset, ResampleVariant};
use log::{error, info};
use rayon::prelude::*;

use crate::config::{dataset_name, Plan};
use crate::records::{RecordWriter, ResultRecord, ResultsFile, UnitKey, RESULTS_FILE};
use crate::BenchError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub records_written: usize,
    pub units_run: usize,
    pub units_skipped: usize,
    /// (dataset, message) for every failed dataset or unit.
    pub failures: Vec<(String, String)>,
}

/// Reads a Keel `.dat` file, or a CSV with the label in the last column,
/// and one-hot encodes nominal inputs.
pub fn load_dataset(path: &Path) -> Result<Dataset, BenchError> {
    let text = fs::read_to_string(path)?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let parsed = if is_csv {
        let width = text.lines().find(|l| !l.trim().is_empty()).map_or(1, |l| l.split(',').count());
        parse_csv(&text, width.saturating_sub(1))?
    } else {
        parse_keel(&text)?
    };
    Ok(encode_nominals(&parsed).renamed(dataset_name(path)))
}

fn fold_label(fold: usize) -> char {
    if fold == 0 { 'A' } else { 'B' }
}

/// One (replication, fold, variant) cell of the grid for one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unit {
    pub replication: usize,
    pub fold: usize,
    pub variant: ResampleVariant,
}

pub fn run_unit(data: &Dataset, plan: &Plan, split: &imbdes::data::SplitPlan, unit: Unit) -> Result<Vec<ResultRecord>, BenchError> {
    let started = Instant::now();
    let pair = &split.replications[unit.replication];
    let (train_idx, test_idx) = if unit.fold == 0 { (&pair.fold_a, &pair.fold_b) } else { (&pair.fold_b, &pair.fold_a) };
    let (train, others, _) = standardize(&data.subset(train_idx), &[data.subset(test_idx)]);
    let test = &others[0];

    let base = derive_seed_str(plan.config.seed, data.name());
    let tag = format!("{}/{}/{}", unit.replication, unit.fold, unit.variant);
    let pool_config = PoolConfig { size: plan.config.pool_size, ..Default::default() };
    let pool = generate_pool(&train, unit.variant, &pool_config, derive_seed_str(base, &format!("pool/{tag}")))?;
    let dsel = build_dsel(&train, unit.variant, &pool_config.resample, derive_seed_str(base, &format!("dsel/{tag}")))?;
    let mut config = SelectorConfig {
        k: plan.config.k,
        desknn: plan.config.desknn,
        seed: derive_seed_str(base, &format!("select/{tag}")),
        ..Default::default()
    };
    if let Some(mcb) = plan.config.mcb {
        config.mcb = mcb;
    }
    let selector = DynamicSelector::new(&pool, &dsel, config, &plan.selectors)?;
    let setup_ms = started.elapsed().as_millis() as u64;

    let n = test.n_samples();
    let mut predictions: Vec<Vec<usize>> = vec![Vec::with_capacity(n); plan.selectors.len()];
    let mut scores: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(n); plan.selectors.len()];
    let mut elapsed = vec![0u128; plan.selectors.len()];
    for row in test.rows() {
        let q = selector.context().query(row)?;
        for (s, &scheme) in plan.selectors.iter().enumerate() {
            let t = Instant::now();
            let d = selector.decide_query(scheme, &q)?;
            elapsed[s] += t.elapsed().as_micros();
            predictions[s].push(d.result.predicted_class);
            scores[s].push(d.scores);
        }
    }

    let mut records = Vec::with_capacity(plan.selectors.len() * plan.metrics.len());
    for (s, scheme) in plan.selectors.iter().enumerate() {
        for &metric in &plan.metrics {
            let value = evaluate(metric, &predictions[s], &scores[s], test.labels())?;
            records.push(ResultRecord {
                dataset: data.name().to_string(),
                variant: unit.variant.name().to_string(),
                selector: scheme.name().to_string(),
                replication: (unit.replication + 1) as u8,
                fold: fold_label(unit.fold),
                metric: metric.name().to_string(),
                value,
                wall_time_ms: setup_ms + (elapsed[s] / 1000) as u64,
            });
        }
    }
    Ok(records)
}

fn units(plan: &Plan) -> Vec<Unit> {
    let mut out = Vec::new();
    for replication in 0..imbdes::data::REPLICATIONS {
        for fold in 0..2 {
            for &variant in &plan.variants {
                out.push(Unit { replication, fold, variant });
            }
        }
    }
    out
}

/// Runs every dataset in `plan`, appending to `<output>/results.csv`.
/// Units already present in full are skipped, so an interrupted run resumes.
pub fn run_experiment(plan: &Plan) -> Result<RunSummary, BenchError> {
    let out_dir = &plan.config.output;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(RESULTS_FILE);
    let hash = plan.hash();
    let per_unit_records = plan.selectors.len() * plan.metrics.len();
    let mut writer = RecordWriter::open(
        &path,
        &[
            ("config_hash", hash.clone()),
            ("seed", plan.config.seed.to_string()),
            ("version", env!("CARGO_PKG_VERSION").to_string()),
        ],
    )?;

    let mut per_unit: BTreeMap<UnitKey, usize> = BTreeMap::new();
    let mut existing_keys: BTreeSet<(UnitKey, String, String)> = BTreeSet::new();
    let existing = ResultsFile::read(&path)?;
    if existing.manifest_value("config_hash") != Some(hash.as_str()) {
        return Err(BenchError::Validation(format!("{} holds results for a different configuration", path.display())));
    }
    for r in &existing.records {
        if existing_keys.insert((r.unit_key(), r.selector.clone(), r.metric.clone())) {
            *per_unit.entry(r.unit_key()).or_default() += 1;
        }
    }

    let mut summary = RunSummary::default();
    for dataset_path in &plan.config.datasets {
        let name = dataset_name(dataset_path);
        let data = match load_dataset(dataset_path) {
            Ok(d) => d,
            Err(e) => {
                error!("{name}: {e}");
                summary.failures.push((name, e.to_string()));
                continue;
            }
        };
        let split = stratified_5x2(&data, derive_seed_str(plan.config.seed, &format!("split/{name}")));
        let (pending, done): (Vec<Unit>, Vec<Unit>) = units(plan).into_iter().partition(|u| {
            let key = UnitKey {
                dataset: name.clone(),
                variant: u.variant.name().to_string(),
                replication: (u.replication + 1) as u8,
                fold: fold_label(u.fold),
            };
            per_unit.get(&key).copied().unwrap_or(0) < per_unit_records
        });
        summary.units_skipped += done.len();
        info!("{name}: {} units to run, {} already done", pending.len(), done.len());
        let results: Vec<Result<Vec<ResultRecord>, BenchError>> =
            pending.par_iter().map(|&u| run_unit(&data, plan, &split, u)).collect();
        for (unit, result) in pending.iter().zip(results) {
            match result {
                Ok(mut records) => {
                    // a partly written unit keeps the records it already has
                    records.retain(|r| !existing_keys.contains(&(r.unit_key(), r.selector.clone(), r.metric.clone())));
                    writer.append(&records)?;
                    summary.records_written += records.len();
                    summary.units_run += 1;
                }
                Err(e) => {
                    error!("{name} {unit:?}: {e}");
                    summary.failures.push((name.clone(), format!("{unit:?}: {e}")));
                }
            }
        }
    }
    Ok(summary)
}

