//! Rank tables and sign tests over fold-mean scores.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use imbdes::dynsel::Scheme;
use imbdes::eval::stats::{count_wins, z_test_vs_best};
use imbdes::eval::{average_ranks, finner_stepdown, sign_test, Metric};
use imbdes::ResampleVariant;

use crate::records::ResultRecord;
use crate::BenchError;

pub const FOLDS: usize = 10;
pub const SIGN_ALPHAS: [f64; 3] = [0.1, 0.05, 0.01];
const FINNER_ALPHA: f64 = 0.05;

/// (dataset, variant, selector).
type CellKey = (String, String, String);

/// Mean over the ten folds of every (dataset, variant, selector) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldMeans {
    pub datasets: Vec<String>,
    pub variants: Vec<String>,
    pub selectors: Vec<String>,
    pub values: BTreeMap<CellKey, f64>,
}

impl FoldMeans {
    pub fn get(&self, dataset: &str, variant: &str, selector: &str) -> f64 {
        self.values[&(dataset.to_string(), variant.to_string(), selector.to_string())]
    }

    /// Per-dataset scores of one (variant, selector) method.
    pub fn column(&self, variant: &str, selector: &str) -> Vec<f64> {
        self.datasets.iter().map(|d| self.get(d, variant, selector)).collect()
    }
}

fn registry_order<T: Copy>(names: BTreeSet<String>, all: &[T], name: impl Fn(T) -> &'static str) -> Vec<String> {
    let mut known: Vec<String> = all.iter().map(|&t| name(t).to_string()).filter(|n| names.contains(n)).collect();
    known.extend(names.into_iter().filter(|n| !all.iter().any(|&t| name(t) == n)));
    known
}

/// Fold means for `metric`. Every (dataset, variant, selector) combination
/// seen must have all ten folds; otherwise the missing cells are listed.
/// Repeated records for the same fold keep the last one.
pub fn fold_means(records: &[ResultRecord], metric: Metric) -> Result<FoldMeans, BenchError> {
    let mut cells: BTreeMap<CellKey, BTreeMap<(u8, char), f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.metric == metric.name()) {
        cells
            .entry((r.dataset.clone(), r.variant.clone(), r.selector.clone()))
            .or_default()
            .insert((r.replication, r.fold), r.value);
    }
    if cells.is_empty() {
        return Err(BenchError::Records(format!("no records for metric {metric}")));
    }
    let datasets: Vec<String> = cells.keys().map(|k| k.0.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let variants = registry_order(cells.keys().map(|k| k.1.clone()).collect(), &ResampleVariant::ALL, |v| v.name());
    let selectors = registry_order(cells.keys().map(|k| k.2.clone()).collect(), &Scheme::ALL, |s| s.name());

    let mut missing = Vec::new();
    let mut values = BTreeMap::new();
    for d in &datasets {
        for v in &variants {
            for s in &selectors {
                let key = (d.clone(), v.clone(), s.clone());
                match cells.get(&key) {
                    None => missing.push(format!("{d} / {v} / {s}: no folds")),
                    Some(folds) if folds.len() < FOLDS => {
                        let absent: Vec<String> = (1..=5u8)
                            .flat_map(|r| ['A', 'B'].map(move |f| (r, f)))
                            .filter(|k| !folds.contains_key(k))
                            .map(|(r, f)| format!("{r}{f}"))
                            .collect();
                        missing.push(format!("{d} / {v} / {s}: missing folds {}", absent.join(" ")));
                    }
                    Some(folds) => {
                        values.insert(key, folds.values().sum::<f64>() / folds.len() as f64);
                    }
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(BenchError::IncompleteGrid(missing));
    }
    Ok(FoldMeans { datasets, variants, selectors, values })
}

/// Average ranks of a set of methods plus which ones Finner cannot
/// separate from the best.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedMethods {
    pub methods: Vec<String>,
    pub average_ranks: Vec<f64>,
    pub best: usize,
    /// True for the best method and for every method whose difference from
    /// it is not significant.
    pub equivalent_to_best: Vec<bool>,
}

fn rank_methods(methods: Vec<String>, columns: &[Vec<f64>]) -> Result<RankedMethods, BenchError> {
    let n_datasets = columns[0].len();
    let table: Vec<Vec<f64>> = (0..n_datasets).map(|d| columns.iter().map(|c| c[d]).collect()).collect();
    let ranks = average_ranks(&table, methods.clone(), true)?;
    let best = ranks.best();
    let p = z_test_vs_best(&ranks);
    let others: Vec<usize> = (0..methods.len()).filter(|&i| i != best).collect();
    let mut equivalent_to_best = vec![true; methods.len()];
    if !others.is_empty() {
        let rejected = finner_stepdown(&others.iter().map(|&i| p[i]).collect::<Vec<_>>(), FINNER_ALPHA)?;
        for (&i, r) in others.iter().zip(rejected) {
            equivalent_to_best[i] = !r;
        }
    }
    Ok(RankedMethods { methods, average_ranks: ranks.average, best, equivalent_to_best })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignRow {
    pub selector: String,
    pub variant: String,
    pub baseline: String,
    pub wins: u64,
    pub ties: u64,
    pub losses: u64,
    /// Significance at each level of [`SIGN_ALPHAS`].
    pub significant: [bool; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub metric: Metric,
    pub n_datasets: usize,
    /// Per selector: its variants ranked against each other.
    pub by_selector: Vec<(String, RankedMethods)>,
    /// Each selector with its best variant, ranked together.
    pub global: RankedMethods,
    pub sign_tests: Vec<SignRow>,
}

fn sign_row(selector: &str, variant: &str, baseline: String, a: &[f64], b: &[f64]) -> Result<SignRow, BenchError> {
    let (wins, ties, losses) = count_wins(a, b);
    let mut significant = [false; 3];
    for (s, &alpha) in significant.iter_mut().zip(&SIGN_ALPHAS) {
        *s = sign_test(wins, ties, losses, alpha)?.significant;
    }
    Ok(SignRow { selector: selector.into(), variant: variant.into(), baseline, wins, ties, losses, significant })
}

pub fn make_report(records: &[ResultRecord], metric: Metric) -> Result<Report, BenchError> {
    let means = fold_means(records, metric)?;
    let mut by_selector = Vec::new();
    let mut best_variant = BTreeMap::new();
    for s in &means.selectors {
        let columns: Vec<Vec<f64>> = means.variants.iter().map(|v| means.column(v, s)).collect();
        let ranked = rank_methods(means.variants.clone(), &columns)?;
        best_variant.insert(s.clone(), means.variants[ranked.best].clone());
        by_selector.push((s.clone(), ranked));
    }

    let labels: Vec<String> = means.selectors.iter().map(|s| format!("{} {}", best_variant[s], s)).collect();
    let columns: Vec<Vec<f64>> = means.selectors.iter().map(|s| means.column(&best_variant[s], s)).collect();
    let global = rank_methods(labels, &columns)?;

    let mut sign_tests = Vec::new();
    let plain = ResampleVariant::Ba.name();
    let has_plain = means.variants.iter().any(|v| v == plain);
    let static_name = Scheme::Static.name();
    for s in &means.selectors {
        let v = &best_variant[s];
        let mine = means.column(v, s);
        if has_plain {
            sign_tests.push(sign_row(s, v, format!("{plain} {s}"), &mine, &means.column(plain, s))?);
        }
        if s != static_name && best_variant.contains_key(static_name) {
            let sv = &best_variant[static_name];
            sign_tests.push(sign_row(s, v, format!("{sv} {static_name}"), &mine, &means.column(sv, static_name))?);
        }
    }
    Ok(Report { metric, n_datasets: means.datasets.len(), by_selector, global, sign_tests })
}

fn cell(ranked: &RankedMethods, i: usize) -> String {
    let r = format!("{:.2}", ranked.average_ranks[i]);
    if i == ranked.best {
        format!("**{r}**")
    } else if ranked.equivalent_to_best[i] {
        format!("[{r}]")
    } else {
        r
    }
}

impl Report {
    /// Plain-text tables. `**x**` marks the best rank, `[x]` a rank the
    /// Finner procedure cannot separate from it.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "metric: {}   datasets: {}", self.metric, self.n_datasets);
        let _ = writeln!(out, "\nAverage ranks of preprocessing variants per selector");
        if let Some((_, first)) = self.by_selector.first() {
            let _ = write!(out, "{:<10}", "selector");
            for m in &first.methods {
                let _ = write!(out, " {m:>10}");
            }
            out.push('\n');
        }
        for (s, ranked) in &self.by_selector {
            let _ = write!(out, "{s:<10}");
            for i in 0..ranked.methods.len() {
                let _ = write!(out, " {:>10}", cell(ranked, i));
            }
            out.push('\n');
        }

        let _ = writeln!(out, "\nGlobal ranking of each selector with its best variant");
        let mut order: Vec<usize> = (0..self.global.methods.len()).collect();
        order.sort_by(|&a, &b| self.global.average_ranks[a].total_cmp(&self.global.average_ranks[b]).then(a.cmp(&b)));
        for i in order {
            let _ = writeln!(out, "{:<22} {:>10}", self.global.methods[i], cell(&self.global, i));
        }

        let _ = writeln!(out, "\nSign tests (wins/ties/losses; * significant at 0.10 / 0.05 / 0.01)");
        for row in &self.sign_tests {
            let marks: Vec<&str> = row.significant.iter().map(|&s| if s { "*" } else { "-" }).collect();
            let _ = writeln!(
                out,
                "{:<22} vs {:<22} {:>3}/{:>3}/{:>3}  {}",
                format!("{} {}", row.variant, row.selector),
                row.baseline,
                row.wins,
                row.ties,
                row.losses,
                marks.join(" ")
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records(grid: &[(&str, &str, &str, f64)]) -> Vec<ResultRecord> {
        let mut out = Vec::new();
        for &(d, v, s, value) in grid {
            for rep in 1..=5u8 {
                for fold in ['A', 'B'] {
                    out.push(ResultRecord {
                        dataset: d.into(),
                        variant: v.into(),
                        selector: s.into(),
                        replication: rep,
                        fold,
                        metric: "auc".into(),
                        value,
                        wall_time_ms: 0,
                    });
                }
            }
        }
        out
    }

    #[test]
    fn dominant_method() {
        let mut grid = Vec::new();
        for d in ["d1", "d2", "d3"] {
            grid.push((d, "Ba", "KNU", 0.6));
            grid.push((d, "Ba-SM", "KNU", 0.8));
        }
        let report = make_report(&records(&grid), Metric::Auc).unwrap();
        let (_, ranked) = &report.by_selector[0];
        assert_eq!(ranked.methods, vec!["Ba", "Ba-SM"]);
        assert_eq!(ranked.average_ranks, vec![2.0, 1.0]);
        assert_eq!(ranked.best, 1);
        assert_eq!(report.sign_tests[0].wins, 3);
        assert!(report.render().contains("**1.00**"));
    }

    #[test]
    fn single_method() {
        let report = make_report(&records(&[("d1", "Ba", "STATIC", 0.5)]), Metric::Auc).unwrap();
        assert_eq!(report.global.average_ranks, vec![1.0]);
    }

    #[test]
    fn incomplete_grid_lists_cells() {
        let mut recs = records(&[("d1", "Ba", "KNU", 0.5), ("d2", "Ba", "KNU", 0.5), ("d1", "Ba-SM", "KNU", 0.5)]);
        recs.retain(|r| !(r.dataset == "d1" && r.variant == "Ba" && r.replication == 2 && r.fold == 'B'));
        match make_report(&recs, Metric::Auc) {
            Err(BenchError::IncompleteGrid(cells)) => {
                assert_eq!(cells.len(), 2);
                assert!(cells.iter().any(|c| c.contains("d2 / Ba-SM / KNU")));
                assert!(cells.iter().any(|c| c.contains("missing folds 2B")));
            }
            other => panic!("expected an incomplete grid, got {other:?}"),
        }
    }
}
