use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::factorial::ln_binomial;

use super::metrics::fractional_ranks;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub methods: Vec<String>,
    /// `ranks[dataset][method]`, 1 = best.
    pub ranks: Vec<Vec<f64>>,
    pub average: Vec<f64>,
}

impl RankTable {
    /// Index of the method with the lowest average rank (first on ties).
    pub fn best(&self) -> usize {
        let mut best = 0;
        for (i, &r) in self.average.iter().enumerate() {
            if r < self.average[best] {
                best = i;
            }
        }
        best
    }
}

/// Ranks methods within each dataset (`table[dataset][method]`) and averages.
pub fn average_ranks(table: &[Vec<f64>], methods: Vec<String>, higher_is_better: bool) -> Result<RankTable> {
    if table.is_empty() || methods.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(row) = table.iter().find(|r| r.len() != methods.len()) {
        return Err(Error::LengthMismatch(row.len(), methods.len()));
    }
    if table.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::Invalid("rank table has missing cells".into()));
    }
    let ranks: Vec<Vec<f64>> = table
        .iter()
        .map(|row| {
            let keyed: Vec<f64> = if higher_is_better { row.iter().map(|v| -v).collect() } else { row.clone() };
            fractional_ranks(&keyed)
        })
        .collect();
    let n = ranks.len() as f64;
    let average = (0..methods.len()).map(|m| ranks.iter().map(|r| r[m]).sum::<f64>() / n).collect();
    Ok(RankTable { methods, ranks, average })
}

/// Two-sided p-values of each method against the best-ranked one, from the
/// rank-difference z statistic. The best method's own entry is 1.
pub fn z_test_vs_best(ranks: &RankTable) -> Vec<f64> {
    let m = ranks.methods.len() as f64;
    let n = ranks.ranks.len() as f64;
    let se = (m * (m + 1.0) / (6.0 * n)).sqrt();
    let best = ranks.average[ranks.best()];
    let normal = Normal::standard();
    ranks
        .average
        .iter()
        .map(|&r| {
            let z = (r - best) / se;
            (2.0 * (1.0 - normal.cdf(z.abs()))).min(1.0)
        })
        .collect()
}

/// Finner-adjusted p-values, returned in input order.
pub fn finner_adjust(p_values: &[f64]) -> Result<Vec<f64>> {
    if p_values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = p_values.len() as f64;
    let mut order: Vec<usize> = (0..p_values.len()).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0; p_values.len()];
    let mut running: f64 = 0.0;
    for (pos, &i) in order.iter().enumerate() {
        let j = (pos + 1) as f64;
        let a = 1.0 - (1.0 - p_values[i]).powf(k / j);
        running = running.max(a.min(1.0));
        adjusted[i] = running;
    }
    Ok(adjusted)
}

/// Step-down rejections at level `alpha`, in input order.
pub fn finner_stepdown(p_values: &[f64], alpha: f64) -> Result<Vec<bool>> {
    Ok(finner_adjust(p_values)?.into_iter().map(|a| a <= alpha).collect())
}

/// P(W ≥ w) for W ~ Binomial(n, 1/2).
pub fn binomial_upper_tail(n: u64, w: u64) -> f64 {
    if w == 0 {
        return 1.0;
    }
    if w > n {
        return 0.0;
    }
    let ln_half_n = n as f64 * std::f64::consts::LN_2;
    (w..=n).map(|k| (ln_binomial(n, k) - ln_half_n).exp()).sum::<f64>().min(1.0)
}

/// Smallest win count whose exact upper tail is at most `alpha`; `None`
/// when even `n` wins is not enough.
pub fn sign_test_critical_value(n: u64, alpha: f64) -> Option<u64> {
    (0..=n).find(|&w| binomial_upper_tail(n, w) <= alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    pub wins: u64,
    pub ties: u64,
    pub losses: u64,
    /// Wins plus half the ties, rounded down.
    pub effective_wins: u64,
    pub critical_value: Option<u64>,
    pub significant: bool,
}

pub fn sign_test(wins: u64, ties: u64, losses: u64, alpha: f64) -> Result<SignTest> {
    let n = wins + ties + losses;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let effective_wins = wins + ties / 2;
    let critical_value = sign_test_critical_value(n, alpha);
    let significant = critical_value.is_some_and(|c| effective_wins >= c);
    Ok(SignTest { wins, ties, losses, effective_wins, critical_value, significant })
}

/// Wins, ties and losses of `a` over `b`, higher being better.
pub fn count_wins(a: &[f64], b: &[f64]) -> (u64, u64, u64) {
    let mut out = (0, 0, 0);
    for (x, y) in a.iter().zip(b) {
        if x > y {
            out.0 += 1;
        } else if x == y {
            out.1 += 1;
        } else {
            out.2 += 1;
        }
    }
    out
}
