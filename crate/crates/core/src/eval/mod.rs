//! Performance metrics and rank-based statistical comparison.

pub mod metrics;
pub mod stats;

pub use metrics::{auc_multiclass, evaluate, f_measure_weighted, g_mean, Metric};
pub use stats::{average_ranks, finner_adjust, finner_stepdown, sign_test, RankTable, SignTest};
