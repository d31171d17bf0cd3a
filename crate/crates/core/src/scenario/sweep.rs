use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintThresholds;
use crate::error::ScenarioError;
use crate::finance::CostModel;

use super::run::{run_scenario, Dataset, ScenarioOutcome};
use super::spec::ScenarioSpec;

/// Ranking criteria. Each ranks best first: lowest hospitalization rate,
/// lowest utilization (least strain on the network), highest P&L, lowest
/// acute share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankKey {
    Alpha,
    Beta,
    Pnl,
    AcuteShare,
}

impl RankKey {
    pub const ALL: [RankKey; 4] = [RankKey::Alpha, RankKey::Beta, RankKey::Pnl, RankKey::AcuteShare];

    fn compare(self, a: &ScenarioOutcome, b: &ScenarioOutcome) -> Ordering {
        match self {
            RankKey::Alpha => a.rates.alpha.total_cmp(&b.rates.alpha),
            RankKey::Beta => a.rates.beta.total_cmp(&b.rates.beta),
            RankKey::Pnl => b.pnl.cmp(&a.pnl),
            RankKey::AcuteShare => a.acute_share.total_cmp(&b.acute_share),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RankKey::Alpha => "alpha",
            RankKey::Beta => "beta",
            RankKey::Pnl => "pnl",
            RankKey::AcuteShare => "acute_share",
        }
    }
}

impl fmt::Display for RankKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RankKey {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RankKey::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown ranking key {s:?}"))
    }
}

/// Scenario names ordered by each criterion.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Rankings {
    pub alpha: Vec<String>,
    pub beta: Vec<String>,
    pub pnl: Vec<String>,
    pub acute_share: Vec<String>,
}

impl Rankings {
    pub fn get(&self, key: RankKey) -> &[String] {
        match key {
            RankKey::Alpha => &self.alpha,
            RankKey::Beta => &self.beta,
            RankKey::Pnl => &self.pnl,
            RankKey::AcuteShare => &self.acute_share,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFailure {
    pub name: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Successful outcomes in input order.
    pub outcomes: Vec<ScenarioOutcome>,
    pub failures: Vec<ScenarioFailure>,
    pub rankings: Rankings,
}

/// Names of `outcomes` ordered by `key`, ties broken by name.
pub fn rank(outcomes: &[ScenarioOutcome], key: RankKey) -> Vec<String> {
    let mut refs: Vec<&ScenarioOutcome> = outcomes.iter().collect();
    refs.sort_by(|a, b| key.compare(a, b).then_with(|| a.name.cmp(&b.name)));
    refs.into_iter().map(|o| o.name.clone()).collect()
}

/// Evaluate every spec (in parallel) and rank the ones that succeed.
pub fn sweep(
    dataset: &Dataset,
    specs: &[ScenarioSpec],
    thresholds: &ConstraintThresholds,
    costs: &CostModel,
) -> Result<SweepResult, ScenarioError> {
    if specs.is_empty() {
        return Err(ScenarioError::InvalidSpec("a sweep needs at least one scenario".into()));
    }
    let results: Vec<Result<ScenarioOutcome, ScenarioError>> = specs
        .par_iter()
        .map(|s| run_scenario(dataset, s, thresholds, costs))
        .collect();
    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for (spec, r) in specs.iter().zip(results) {
        match r {
            Ok(o) => outcomes.push(o),
            Err(e) => failures.push(ScenarioFailure {
                name: spec.name.clone(),
                error: e.to_string(),
            }),
        }
    }
    let rankings = Rankings {
        alpha: rank(&outcomes, RankKey::Alpha),
        beta: rank(&outcomes, RankKey::Beta),
        pnl: rank(&outcomes, RankKey::Pnl),
        acute_share: rank(&outcomes, RankKey::AcuteShare),
    };
    Ok(SweepResult {
        outcomes,
        failures,
        rankings,
    })
}
