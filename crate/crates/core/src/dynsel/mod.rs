//! Dynamic classifier and ensemble selection.
//!
//! A [`SelectionContext`] caches the pool's outputs on DSEL; each query gets a
//! region of competence and is routed to one of the [`Scheme`]s.

pub mod meta;
pub mod region;
pub mod rrc;
pub mod selectors;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pool::{DselSet, Pool};

pub use meta::{MetaClassifier, MetaConfig};
pub use region::{profile_similarity, region_of_competence, Query, Region, SelectionContext};
pub use rrc::{RrcConfig, RrcTable};
pub use selectors::{dfp_prune, DesKnnConfig, McbConfig};

/// The ensemble of competence (EoC) chosen for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub selected: Vec<usize>,
    /// Per-selected-classifier vote counts, for schemes that weight votes.
    pub vote_weights: Option<Vec<u32>>,
    pub predicted_class: usize,
    /// True when no classifier qualified and the whole candidate pool voted.
    pub fallback: bool,
}

/// Base schemes that can run behind the frienemy pruning step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FireBase {
    Lca,
    Mcb,
    Kne,
    Knu,
    DesKnn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    Static,
    Rank,
    Lca,
    Mcb,
    Kne,
    Knu,
    DesKnn,
    DesP,
    DesRrc,
    MetaDes,
    Fire(FireBase),
}

impl Scheme {
    pub const ALL: [Scheme; 15] = [
        Scheme::Static,
        Scheme::Rank,
        Scheme::Lca,
        Scheme::Mcb,
        Scheme::Kne,
        Scheme::Knu,
        Scheme::DesKnn,
        Scheme::DesP,
        Scheme::DesRrc,
        Scheme::MetaDes,
        Scheme::Fire(FireBase::Lca),
        Scheme::Fire(FireBase::Mcb),
        Scheme::Fire(FireBase::Kne),
        Scheme::Fire(FireBase::Knu),
        Scheme::Fire(FireBase::DesKnn),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Static => "STATIC",
            Scheme::Rank => "RANK",
            Scheme::Lca => "LCA",
            Scheme::Mcb => "MCB",
            Scheme::Kne => "KNE",
            Scheme::Knu => "KNU",
            Scheme::DesKnn => "DES-KNN",
            Scheme::DesP => "DESP",
            Scheme::DesRrc => "DES-RRC",
            Scheme::MetaDes => "META-DES",
            Scheme::Fire(FireBase::Lca) => "F-LCA",
            Scheme::Fire(FireBase::Mcb) => "F-MCB",
            Scheme::Fire(FireBase::Kne) => "F-KNE",
            Scheme::Fire(FireBase::Knu) => "F-KNU",
            Scheme::Fire(FireBase::DesKnn) => "F-DES-KNN",
        }
    }

    fn base(self) -> Scheme {
        match self {
            Scheme::Fire(FireBase::Lca) => Scheme::Lca,
            Scheme::Fire(FireBase::Mcb) => Scheme::Mcb,
            Scheme::Fire(FireBase::Kne) => Scheme::Kne,
            Scheme::Fire(FireBase::Knu) => Scheme::Knu,
            Scheme::Fire(FireBase::DesKnn) => Scheme::DesKnn,
            other => other,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub k: usize,
    pub mcb: McbConfig,
    /// Defaults to half and 30% of the pool.
    pub desknn: Option<DesKnnConfig>,
    pub rrc: RrcConfig,
    pub meta: MetaConfig,
    pub seed: u64,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig {
            k: 7,
            mcb: McbConfig::default(),
            desknn: None,
            rrc: RrcConfig::default(),
            meta: MetaConfig::default(),
            seed: 0,
        }
    }
}

/// A selection outcome plus class scores: the mean support of the selected
/// classifiers, weighted by their votes where the scheme assigns any.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub result: SelectionResult,
    pub scores: Vec<f64>,
}

pub fn static_majority_vote(pool: &Pool, x: &[f64]) -> Result<usize> {
    pool.majority_vote(x)
}

/// Answers queries for any scheme over a fixed pool and DSEL.
pub struct DynamicSelector<'a> {
    ctx: SelectionContext<'a>,
    config: SelectorConfig,
    desknn: DesKnnConfig,
    rrc: Option<RrcTable>,
    meta: Option<MetaClassifier>,
}

impl<'a> DynamicSelector<'a> {
    /// Prepares the shared state; the RRC table and the meta-classifier are
    /// only built when `schemes` needs them.
    pub fn new(pool: &'a Pool, dsel: &'a DselSet, config: SelectorConfig, schemes: &[Scheme]) -> Result<Self> {
        let ctx = SelectionContext::new(pool, &dsel.data, config.k)?;
        let desknn = config.desknn.unwrap_or_else(|| DesKnnConfig::for_pool(pool.len()));
        let rrc = schemes
            .contains(&Scheme::DesRrc)
            .then(|| RrcTable::compute(&ctx, &config.rrc, config.seed));
        let meta = if schemes.contains(&Scheme::MetaDes) {
            Some(meta::train_meta_classifier(&ctx, dsel.n_original, &config.meta)?)
        } else {
            None
        };
        Ok(DynamicSelector { ctx, config, desknn, rrc, meta })
    }

    pub fn context(&self) -> &SelectionContext<'a> {
        &self.ctx
    }

    pub fn meta_classifier(&self) -> Option<&MetaClassifier> {
        self.meta.as_ref()
    }

    pub fn select(&self, scheme: Scheme, q: &Query) -> Result<SelectionResult> {
        let all = self.ctx.all_classifiers();
        let candidates = match scheme {
            Scheme::Fire(_) => dfp_prune(&self.ctx, q),
            _ => all,
        };
        self.run(scheme.base(), q, &candidates)
    }

    fn run(&self, scheme: Scheme, q: &Query, candidates: &[usize]) -> Result<SelectionResult> {
        let ctx = &self.ctx;
        Ok(match scheme {
            Scheme::Static => selectors::ensemble(q, candidates.to_vec(), ctx.n_classes(), false),
            Scheme::Rank => selectors::select_rank(ctx, q, candidates),
            Scheme::Lca => selectors::select_lca(ctx, q, candidates),
            Scheme::Mcb => selectors::select_mcb(ctx, q, candidates, &self.config.mcb),
            Scheme::Kne => selectors::select_kne(ctx, q, candidates),
            Scheme::Knu => selectors::select_knu(ctx, q, candidates),
            Scheme::DesKnn => selectors::select_desknn(ctx, q, candidates, &self.desknn),
            Scheme::DesP => selectors::select_desp(ctx, q, candidates),
            Scheme::DesRrc => {
                let table = self.rrc.as_ref().ok_or_else(|| Error::Invalid("DES-RRC was not prepared".into()))?;
                rrc::select_desrrc(ctx, table, q, candidates, &self.config.rrc)
            }
            Scheme::MetaDes => {
                let meta = self.meta.as_ref().ok_or_else(|| Error::Invalid("META-DES was not prepared".into()))?;
                meta::select_metades(ctx, meta, q, candidates)
            }
            Scheme::Fire(_) => unreachable!("FIRE schemes are unwrapped by select"),
        })
    }

    pub fn decide(&self, scheme: Scheme, x: &[f64]) -> Result<Decision> {
        let q = self.ctx.query(x)?;
        self.decide_query(scheme, &q)
    }

    pub fn decide_query(&self, scheme: Scheme, q: &Query) -> Result<Decision> {
        let result = self.select(scheme, q)?;
        let scores = ensemble_scores(q, &result, self.ctx.n_classes());
        Ok(Decision { result, scores })
    }
}

fn ensemble_scores(q: &Query, result: &SelectionResult, n_classes: usize) -> Vec<f64> {
    let mut scores = vec![0.0; n_classes];
    let mut total = 0.0;
    for (k, &i) in result.selected.iter().enumerate() {
        let w = result.vote_weights.as_ref().map_or(1.0, |w| f64::from(w[k]));
        for (s, v) in scores.iter_mut().zip(q.support(i)) {
            *s += w * v;
        }
        total += w;
    }
    if total > 0.0 {
        scores.iter_mut().for_each(|s| *s /= total);
    }
    scores
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("KNORA".parse::<Scheme>().is_err());
    }
}
