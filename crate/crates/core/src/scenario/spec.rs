//! Scenario definitions and their TOML file form.
//!
//! ```toml
//! name = "1C"
//! steps = [1, 2, 3, 4, 5, 6, 7]
//! rehab_ltc_density = 0.4
//!
//! [solve]
//! mode = "fixed_density"
//! acute_density = 3.3
//!
//! [[step]]
//! id = 1
//! to_ambul = 0.8
//! stay = 0.2
//! ```
//!
//! `[[step]]` blocks replace the base fractions of that step; fractions not
//! written are zero. Omitting `steps` runs all seven.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, ScenarioError};

use super::steps::{base_rule, StepRule, STEP_COUNT};

/// How the post-restructuring network is sized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SolveMode {
    /// Size acute beds for a target utilization.
    FixedBeta { beta: f64 },
    /// Size acute beds at the utilization the current network would need to
    /// absorb today's demand.
    ObservedBeta,
    /// Fix the acute bed density (per 1,000 residents) and solve for
    /// utilization.
    FixedDensity { acute_density: f64 },
}

fn all_steps() -> Vec<u8> {
    (1..=STEP_COUNT).collect()
}

fn unit_scale() -> f64 {
    1.0
}

fn is_unit(v: &f64) -> bool {
    *v == 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default = "all_steps")]
    pub steps: Vec<u8>,
    pub solve: SolveMode,
    /// Rehab + LTC density target per 1,000 residents; the current stock is
    /// kept when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rehab_ltc_density: Option<f64>,
    /// Multiplier on every demand volume before the steps run.
    #[serde(default = "unit_scale", skip_serializing_if = "is_unit")]
    pub demand_scale: f64,
    #[serde(default, rename = "step", skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<StepRule>,
}

impl ScenarioSpec {
    /// All seven steps at their base fractions.
    pub fn base(name: impl Into<String>, solve: SolveMode) -> Self {
        ScenarioSpec {
            name: name.into(),
            steps: all_steps(),
            solve,
            rehab_ltc_density: None,
            demand_scale: 1.0,
            overrides: Vec::new(),
        }
    }

    pub fn with_steps(mut self, steps: impl IntoIterator<Item = u8>) -> Self {
        self.steps = steps.into_iter().collect();
        self
    }

    pub fn with_override(mut self, rule: StepRule) -> Self {
        self.overrides.retain(|r| r.id != rule.id);
        self.overrides.push(rule);
        self
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |m: String| Err(ScenarioError::InvalidSpec(m));
        let mut seen = BTreeSet::new();
        for &s in &self.steps {
            if !(1..=STEP_COUNT).contains(&s) {
                return invalid(format!("step {s} does not exist"));
            }
            if !seen.insert(s) {
                return invalid(format!("step {s} listed twice"));
            }
        }
        let mut overridden = BTreeSet::new();
        for r in &self.overrides {
            r.validate()?;
            if !overridden.insert(r.id) {
                return invalid(format!("step {} overridden twice", r.id));
            }
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        match self.solve {
            SolveMode::FixedBeta { beta: v } | SolveMode::FixedDensity { acute_density: v }
                if !v.is_finite() =>
            {
                return invalid(format!("solve target must be a finite number, got {v}"))
            }
            _ => {}
        }
        if let Some(d) = self.rehab_ltc_density {
            if !(d >= 0.0 && d.is_finite()) {
                return invalid(format!("rehab density must be non-negative, got {d}"));
            }
        }
        if !positive(self.demand_scale) {
            return invalid(format!("demand scale must be positive, got {}", self.demand_scale));
        }
        Ok(())
    }

    /// Effective rules of the included steps, ascending by id.
    pub fn rules(&self) -> Vec<StepRule> {
        let mut ids: Vec<u8> = self.steps.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter()
            .filter_map(|id| {
                self.overrides
                    .iter()
                    .find(|r| r.id == id)
                    .copied()
                    .or_else(|| base_rule(id))
            })
            .collect()
    }
}

pub fn parse_scenario_spec(bytes: &[u8]) -> Result<ScenarioSpec, ParseError> {
    crate::ingest::parse_toml(bytes)
}

pub fn write_scenario_spec(spec: &ScenarioSpec) -> String {
    crate::ingest::write_toml(spec)
}
