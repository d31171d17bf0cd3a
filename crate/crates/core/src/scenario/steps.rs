use serde::{Deserialize, Serialize};

use crate::equilibrium::DemandAggregate;
use crate::error::ScenarioError;
use crate::model::DhParameters;

use super::stratify::{Bucket, DemandClass, StratifiedDemand};

pub const STEP_COUNT: u8 = 7;
const SUM_TOLERANCE: f64 = 1e-12;

/// What a step draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourcePool {
    Admissions(Bucket),
    /// The above-threshold days of multi-day admissions.
    DaysAboveThreshold,
}

/// Fixed source of each step id. Sources are pairwise disjoint.
pub fn step_source(step: u8) -> Option<(DemandClass, SourcePool)> {
    use Bucket::*;
    use DemandClass::*;
    Some(match step {
        1 => (Lea45, SourcePool::Admissions(Dh)),
        2 => (Lea45, SourcePool::Admissions(Ro1dMinus)),
        3 => (Lea45, SourcePool::Admissions(Ro1dPlus)),
        4 => (Lea45Plus, SourcePool::Admissions(Ro1dMinus)),
        5 => (Lea45Plus, SourcePool::Admissions(Ro1dPlus)),
        6 => (Other, SourcePool::Admissions(Ro1dMinus)),
        7 => (Other, SourcePool::DaysAboveThreshold),
        _ => return None,
    })
}

/// Destination shares of a step's source. They must sum to one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fractions {
    pub to_dh: f64,
    pub to_ambul: f64,
    pub to_rsa: f64,
    pub to_amau_avoided: f64,
    pub to_rehab: f64,
    pub stay: f64,
}

impl Fractions {
    pub fn stay_all() -> Self {
        Fractions {
            stay: 1.0,
            ..Default::default()
        }
    }

    pub fn sum(&self) -> f64 {
        self.to_dh + self.to_ambul + self.to_rsa + self.to_amau_avoided + self.to_rehab + self.stay
    }

    fn all(&self) -> [(&'static str, f64); 6] {
        [
            ("to_dh", self.to_dh),
            ("to_ambul", self.to_ambul),
            ("to_rsa", self.to_rsa),
            ("to_amau_avoided", self.to_amau_avoided),
            ("to_rehab", self.to_rehab),
            ("stay", self.stay),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRule {
    pub id: u8,
    #[serde(flatten)]
    pub fractions: Fractions,
}

impl StepRule {
    pub fn new(id: u8, fractions: Fractions) -> Self {
        StepRule { id, fractions }
    }

    pub fn source(&self) -> Option<(DemandClass, SourcePool)> {
        step_source(self.id)
    }

    /// Range, sum and destination checks.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |msg: String| Err(ScenarioError::InvalidSpec(format!("step {}: {msg}", self.id)));
        let Some((_, pool)) = self.source() else {
            return invalid(format!("step id must be 1..={STEP_COUNT}"));
        };
        for (name, v) in self.fractions.all() {
            if !(0.0..=1.0).contains(&v) {
                return invalid(format!("{name} = {v} outside [0, 1]"));
            }
        }
        let sum = self.fractions.sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return invalid(format!("fractions sum to {sum}, not 1"));
        }
        let f = &self.fractions;
        match pool {
            SourcePool::Admissions(bucket) => {
                if f.to_rsa != 0.0 || f.to_rehab != 0.0 {
                    return invalid("admission steps cannot move to RSA or rehab".into());
                }
                if bucket == Bucket::Dh && f.to_dh != 0.0 {
                    return invalid("a DH source keeps DH admissions through `stay`".into());
                }
            }
            SourcePool::DaysAboveThreshold => {
                if f.to_dh != 0.0 || f.to_ambul != 0.0 || f.to_amau_avoided != 0.0 {
                    return invalid("the above-threshold step moves days to RSA or rehab only".into());
                }
            }
        }
        Ok(())
    }
}

/// Reallocation shares of the base restructuring scenario.
pub fn base_rule(id: u8) -> Option<StepRule> {
    let f = |to_dh, to_ambul, to_amau_avoided, to_rsa, stay| Fractions {
        to_dh,
        to_ambul,
        to_rsa,
        to_amau_avoided,
        to_rehab: 0.0,
        stay,
    };
    let fractions = match id {
        1 => f(0.0, 0.55, 0.0, 0.0, 0.45),
        2 => f(0.5, 0.5, 0.0, 0.0, 0.0),
        3 => f(0.2, 0.2, 0.0, 0.0, 0.6),
        4 => f(0.5, 0.5, 0.0, 0.0, 0.0),
        5 => f(0.2, 0.2, 0.0, 0.0, 0.6),
        6 => f(0.4, 0.0, 0.1, 0.0, 0.5),
        7 => f(0.0, 0.0, 0.0, 0.2, 0.8),
        _ => return None,
    };
    Some(StepRule::new(id, fractions))
}

pub fn base_rules() -> Vec<StepRule> {
    (1..=STEP_COUNT).filter_map(base_rule).collect()
}

/// Apply one step. Returns the new demand and the change in the aggregate.
///
/// Moved RO admissions take the bucket mean stay with them; each admission
/// moved to DH generates `accesses_per_admission` accesses, each one moved
/// to ambulatory care one service. Avoided admissions leave no demand. The
/// above-threshold step moves days, not admissions.
pub fn apply_step(
    demand: &StratifiedDemand,
    rule: &StepRule,
    params: &DhParameters,
) -> Result<(StratifiedDemand, DemandAggregate), ScenarioError> {
    rule.validate()?;
    let (class, pool) = rule.source().expect("validated");
    let f = rule.fractions;
    let mut next = demand.clone();
    let mut delta;
    let mut diverted = DemandAggregate::default();
    let cd = next.class_mut(class);

    match pool {
        SourcePool::Admissions(bucket) => {
            if bucket == Bucket::Dh && !cd.dh_available {
                return Err(ScenarioError::UnavailableData {
                    step: rule.id,
                    class: class.to_string(),
                });
            }
            let cell = *cd.cell(bucket);
            let to_dh = cell.admissions * f.to_dh;
            let to_ambul = cell.admissions * f.to_ambul;
            let avoided = cell.admissions * f.to_amau_avoided;
            let moved = to_dh + to_ambul + avoided;
            let days_out = cell.days * f.to_dh + cell.days * f.to_ambul + cell.days * f.to_amau_avoided;

            let target = cd.cell_mut(bucket);
            target.admissions = cell.admissions * f.stay;
            target.days = cell.days * f.stay;
            if bucket == Bucket::Ro1dPlus {
                cd.days_above_threshold *= f.stay;
            }

            diverted.dh_admissions = to_dh;
            diverted.dh_accesses = to_dh * params.accesses_per_admission;
            diverted.ambul_services = to_ambul;
            diverted.avoided_admissions = avoided;

            delta = diverted;
            if bucket == Bucket::Dh {
                delta.dh_admissions -= moved;
                delta.dh_accesses -= days_out;
            } else {
                delta.ro_admissions = -moved;
                delta.ro_days = -days_out;
            }
        }
        SourcePool::DaysAboveThreshold => {
            let pool_days = cd.days_above_threshold;
            let to_rsa = pool_days * f.to_rsa;
            let to_rehab = pool_days * f.to_rehab;
            cd.days_above_threshold = pool_days * f.stay;
            cd.ro_1d_plus.days = (cd.ro_1d_plus.days - (to_rsa + to_rehab)).max(0.0);
            diverted.rsa_days = to_rsa;
            diverted.rehab_days = to_rehab;
            delta = diverted;
            delta.ro_days = -(to_rsa + to_rehab);
        }
    }
    next.diverted[usize::from(rule.id - 1)].add(&diverted);
    Ok((next, delta))
}

/// Apply the rules in the given order.
pub fn apply_steps(
    demand: &StratifiedDemand,
    rules: &[StepRule],
    params: &DhParameters,
) -> Result<StratifiedDemand, ScenarioError> {
    let mut current = demand.clone();
    for rule in rules {
        current = apply_step(&current, rule, params)?.0;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::stratify::Cell;

    fn params() -> DhParameters {
        DhParameters::default()
    }

    #[test]
    fn base_fractions_are_valid() {
        for r in base_rules() {
            r.validate().unwrap();
            assert_eq!(r.fractions.sum(), 1.0);
        }
        assert_eq!(base_rules().len(), 7);
    }

    #[test]
    fn step1_on_dh() {
        let mut d = StratifiedDemand::empty();
        d.lea45.dh = Cell { admissions: 100.0, days: 200.0 };
        d.lea45.dh_available = true;
        let (next, delta) = apply_step(&d, &base_rule(1).unwrap(), &params()).unwrap();
        assert!((next.lea45.dh.admissions - 45.0).abs() < 1e-12);
        assert!((next.lea45.dh.days - 90.0).abs() < 1e-12);
        assert!((delta.ambul_services - 55.0).abs() < 1e-12);
        assert!((next.aggregate().dh_accesses - 90.0).abs() < 1e-12);
    }

    #[test]
    fn step3_splits_multi_day() {
        let mut d = StratifiedDemand::empty();
        d.lea45.ro_1d_plus = Cell { admissions: 100.0, days: 500.0 };
        let (next, delta) = apply_step(&d, &base_rule(3).unwrap(), &params()).unwrap();
        assert!((next.lea45.ro_1d_plus.admissions - 60.0).abs() < 1e-12);
        assert!((next.lea45.ro_1d_plus.days - 300.0).abs() < 1e-12);
        assert!((delta.dh_admissions - 20.0).abs() < 1e-12);
        assert!((delta.dh_accesses - 40.0).abs() < 1e-12);
        assert!((delta.ambul_services - 20.0).abs() < 1e-12);
        assert!((delta.ro_admissions + 40.0).abs() < 1e-12);
    }

    #[test]
    fn step7_moves_days_only() {
        let mut d = StratifiedDemand::empty();
        d.other.ro_1d_plus = Cell { admissions: 300.0, days: 5000.0 };
        d.other.days_above_threshold = 1000.0;
        let (next, delta) = apply_step(&d, &base_rule(7).unwrap(), &params()).unwrap();
        assert_eq!(delta.rsa_days, 200.0);
        assert_eq!(delta.ro_days, -200.0);
        assert_eq!(delta.ro_admissions, 0.0);
        assert_eq!(next.other.ro_1d_plus.admissions, 300.0);
        assert_eq!(next.other.ro_1d_plus.days, 4800.0);
    }

    #[test]
    fn unavailable_dh_source() {
        let mut d = StratifiedDemand::empty();
        d.lea45.dh = Cell { admissions: 10.0, days: 20.0 };
        let err = apply_step(&d, &base_rule(1).unwrap(), &params()).unwrap_err();
        assert!(matches!(err, ScenarioError::UnavailableData { step: 1, .. }));
    }

    #[test]
    fn invalid_rules() {
        let bad_sum = StepRule::new(2, Fractions { to_dh: 0.5, to_ambul: 0.4, ..Default::default() });
        assert!(bad_sum.validate().is_err());
        let bad_id = StepRule::new(8, Fractions::stay_all());
        assert!(bad_id.validate().is_err());
        let rsa_on_admissions = StepRule::new(2, Fractions { to_rsa: 1.0, ..Default::default() });
        assert!(rsa_on_admissions.validate().is_err());
        let dh_on_dh = StepRule::new(1, Fractions { to_dh: 1.0, ..Default::default() });
        assert!(dh_on_dh.validate().is_err());
        let ambul_on_days = StepRule::new(7, Fractions { to_ambul: 1.0, ..Default::default() });
        assert!(ambul_on_days.validate().is_err());
        let negative = StepRule::new(2, Fractions { to_dh: 1.5, stay: -0.5, ..Default::default() });
        assert!(negative.validate().is_err());
    }
}
