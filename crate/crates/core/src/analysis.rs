//! Network diagnostics built on the equilibrium: estimating the existing DH
//! bed stock, netting out inter-regional mobility, comparing required and
//! current beds per specialty group, and the per-division performance index.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::equilibrium::{self, DemandAggregate};
use crate::error::{DomainError, ScenarioError};
use crate::ingest::SpecialtyGrouping;
use crate::model::{BedInventory, BedKey, CareType, DhParameters, DrgKind, Provenance, Regime, Sector};
use crate::scenario::{apply_steps, stratify, Bucket, Dataset, ScenarioSpec, SourcePool};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhStockEstimate {
    pub total_dh_beds: f64,
    pub private_dh_beds: f64,
    /// The public stock exceeded the estimated total; private was set to 0.
    pub clamped: bool,
}

/// Total DH beds implied by the yearly accesses, and the private remainder.
/// Pass parameters carrying the stock correction (usually 0.75).
pub fn estimate_dh_bed_stock(
    total_dh_accesses: f64,
    public_dh_beds: f64,
    beta: f64,
    params: &DhParameters,
) -> Result<DhStockEstimate, DomainError> {
    let total = equilibrium::required_dh_beds(total_dh_accesses, beta, params)?;
    let private = total - public_dh_beds;
    let clamped = private < 0.0;
    if clamped {
        log::warn!(
            "estimated DH stock {total:.1} is below the public DH stock {public_dh_beds}; private DH beds set to 0"
        );
    }
    Ok(DhStockEstimate {
        total_dh_beds: total,
        private_dh_beds: private.max(0.0),
        clamped,
    })
}

/// Replace a pending private acute DH/RO split with an estimate.
///
/// The pending private RO entry holds the combined total; the estimate is
/// rounded half-up to whole beds and subtracted from it.
pub fn resolve_private_dh(inv: &BedInventory, private_dh_beds: f64) -> BedInventory {
    let ro = BedKey::new(Sector::Private, Regime::Ro, CareType::Acute);
    let dh = BedKey::new(Sector::Private, Regime::Dh, CareType::Acute);
    if inv.provenance(ro) != Some(Provenance::EstimatedPending) {
        return inv.clone();
    }
    let combined = inv.get(ro);
    let mut dh_beds = (private_dh_beds + 0.5).floor() as i64;
    if dh_beds > combined {
        log::warn!("private DH estimate {dh_beds} exceeds the private total {combined}; capped");
        dh_beds = combined;
    }
    let mut out = inv.clone();
    out.set(dh, dh_beds, Provenance::Estimated);
    out.set(ro, combined - dh_beds, Provenance::Estimated);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobility {
    /// Admissions actually served by the region's hospitals.
    pub net_served: i64,
    /// Outflow minus inflow.
    pub net_outflow: i64,
    /// `net_outflow / net_served`.
    pub dilution: f64,
    /// `net_outflow / resident_admissions`, for comparison.
    pub net_outflow_share_of_residents: f64,
}

pub fn mobility_net(resident_admissions: u64, outflow: u64, inflow: u64) -> Result<Mobility, DomainError> {
    let to_i64 = |v: u64| {
        i64::try_from(v).map_err(|_| DomainError::InvalidParameter {
            name: "admissions",
            reason: "count too large".into(),
        })
    };
    let (resident, outflow, inflow) = (to_i64(resident_admissions)?, to_i64(outflow)?, to_i64(inflow)?);
    let net_served = resident - outflow + inflow;
    if net_served <= 0 {
        return Err(DomainError::NonPositiveNetServed(net_served));
    }
    let net_outflow = outflow - inflow;
    Ok(Mobility {
        net_served,
        net_outflow,
        dilution: net_outflow as f64 / net_served as f64,
        net_outflow_share_of_residents: if resident == 0 {
            0.0
        } else {
            net_outflow as f64 / resident as f64
        },
    })
}

/// Post-scenario demand of one specialty group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupDemand {
    pub demand: DemandAggregate,
    /// Most of the group's admissions are surgical DRGs.
    pub surgical: bool,
}

/// Run the scenario's reallocation steps on each group's DRGs separately.
///
/// Unmapped DRGs are skipped; list them with
/// [`SpecialtyGrouping::unmapped`].
pub fn group_demand(
    dataset: &Dataset,
    spec: &ScenarioSpec,
    grouping: &SpecialtyGrouping,
) -> Result<BTreeMap<String, GroupDemand>, ScenarioError> {
    spec.validate()?;
    let mut codes_by_group: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for (code, group) in &grouping.drg_to_group {
        codes_by_group.entry(group).or_default().insert(code.clone());
    }
    for g in grouping.specialty_to_group.values() {
        codes_by_group.entry(g).or_default();
    }
    let rules = spec.rules();
    let mut out = BTreeMap::new();
    for (group, codes) in codes_by_group {
        let ro = dataset.ro_table.subset(&codes);
        let dh = dataset.dh_table.as_ref().map(|t| t.subset(&codes));
        let mut surgical = 0u64;
        let mut total = 0u64;
        for r in ro.records.iter().chain(dh.iter().flat_map(|t| t.records.iter())) {
            total += r.admissions;
            if r.kind == DrgKind::Surgical {
                surgical += r.admissions;
            }
        }
        let mut strat = stratify(&ro, dh.as_ref(), &dataset.classifier);
        strat.scale(spec.demand_scale);
        // Steps whose source is empty in this group are skipped, so a group
        // without DH rows is not an error.
        let applicable: Vec<_> = rules
            .iter()
            .copied()
            .filter(|r| {
                let (class, pool) = r.source().expect("validated");
                pool != SourcePool::Admissions(Bucket::Dh) || strat.class(class).dh_available
            })
            .collect();
        strat = apply_steps(&strat, &applicable, &dataset.params)?;
        out.insert(
            group.to_string(),
            GroupDemand {
                demand: strat.aggregate(),
                surgical: total > 0 && surgical * 2 > total,
            },
        );
    }
    Ok(out)
}

/// Current beds per group, summed over the group's specialties.
pub fn beds_by_group(
    grouping: &SpecialtyGrouping,
    beds_by_specialty: &BTreeMap<String, u64>,
) -> (BTreeMap<String, f64>, Vec<String>) {
    let mut out = BTreeMap::new();
    let mut unmapped = Vec::new();
    for (specialty, beds) in beds_by_specialty {
        match grouping.specialty_to_group.get(specialty) {
            Some(g) => *out.entry(g.clone()).or_insert(0.0) += *beds as f64,
            None => unmapped.push(specialty.clone()),
        }
    }
    (out, unmapped)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialtyRow {
    pub group: String,
    pub required_beds: f64,
    pub current_beds: f64,
    /// `(required - current) / current`; absent when there are no current beds.
    pub pct_change: Option<f64>,
    pub surgical: bool,
    /// Surgical group whose change falls at or below the threshold.
    pub organizational_inappropriateness: bool,
}

/// Default change at or below which a surgical group is flagged.
pub const DEFAULT_INAPPROPRIATENESS_THRESHOLD: f64 = -0.25;

pub fn specialty_bed_comparison(
    demand_by_group: &BTreeMap<String, GroupDemand>,
    beta: f64,
    current_beds: &BTreeMap<String, f64>,
    params: &DhParameters,
    flag_threshold: f64,
) -> Result<Vec<SpecialtyRow>, DomainError> {
    let groups: BTreeSet<&String> = demand_by_group.keys().chain(current_beds.keys()).collect();
    let mut rows = Vec::with_capacity(groups.len());
    for g in groups {
        let gd = demand_by_group.get(g).copied().unwrap_or_default();
        let required = equilibrium::required_beds(&gd.demand, beta, params)?.total();
        let current = current_beds.get(g).copied().unwrap_or(0.0);
        let pct_change = (current > 0.0).then(|| (required - current) / current);
        rows.push(SpecialtyRow {
            group: g.clone(),
            required_beds: required,
            current_beds: current,
            pct_change,
            surgical: gd.surgical,
            organizational_inappropriateness: gd.surgical
                && pct_change.is_some_and(|p| p <= flag_threshold),
        });
    }
    Ok(rows)
}

/// Planned and emergency workload of one clinical division.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DivisionWorkload {
    pub emergency_days: f64,
    /// Planned-admission days per DRG.
    pub planned_days: BTreeMap<String, f64>,
    /// Per DRG, the share of planned days that stays ordinary.
    pub ro_retention: BTreeMap<String, f64>,
    pub observed_beds: f64,
}

impl DivisionWorkload {
    pub fn validate(&self) -> Result<(), DomainError> {
        let bad = |reason: String| {
            Err(DomainError::InvalidParameter {
                name: "workload",
                reason,
            })
        };
        if !(self.emergency_days >= 0.0) || !(self.observed_beds >= 0.0) {
            return bad("days and beds must be non-negative".into());
        }
        for (drg, d) in &self.planned_days {
            if !(*d >= 0.0) {
                return bad(format!("planned days of {drg} negative"));
            }
        }
        for (drg, p) in &self.ro_retention {
            if !(0.0..=1.0).contains(p) {
                return bad(format!("retention of {drg} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Expected minus observed beds. Planned days kept in RO (share `P_i`) join
/// the emergency days on ordinary beds; the rest move to DH. A DRG without a
/// retention entry stays fully ordinary. Negative means excess beds.
pub fn performance_index(
    w: &DivisionWorkload,
    beta: f64,
    params: &DhParameters,
) -> Result<f64, DomainError> {
    w.validate()?;
    let beta = beta_checked(beta)?;
    let mut dh_days = 0.0;
    let mut ro_days = w.emergency_days;
    for (drg, days) in &w.planned_days {
        let keep = w.ro_retention.get(drg).copied().unwrap_or(1.0);
        dh_days += days * (1.0 - keep);
        ro_days += days * keep;
    }
    let dh = dh_days / (params.turnover * params.dh_service_days * beta);
    let ro = ro_days / (params.ro_service_days * beta);
    Ok(dh + ro - w.observed_beds)
}

fn beta_checked(beta: f64) -> Result<f64, DomainError> {
    if beta > 0.0 && beta.is_finite() {
        Ok(beta)
    } else {
        Err(DomainError::NonPositiveBeta(beta))
    }
}
