//! Statutory network limits: bed densities, hospitalization rate and the two
//! day-hospital share floors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DomainError;
use crate::model::{BedInventory, CareType, Population, Provenance, Regime};

/// Limits. Densities and the hospitalization rate are per 1,000 residents,
/// shares are fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstraintThresholds {
    pub max_total_density: f64,
    pub max_acute_density: f64,
    pub max_rehab_ltc_density: f64,
    pub max_hospitalization_rate: f64,
    pub min_dh_admission_share: f64,
    pub min_dh_bed_share: f64,
}

impl Default for ConstraintThresholds {
    fn default() -> Self {
        ConstraintThresholds {
            max_total_density: 4.0,
            max_acute_density: 3.3,
            max_rehab_ltc_density: 0.7,
            max_hospitalization_rate: 180.0,
            min_dh_admission_share: 0.20,
            min_dh_bed_share: 0.10,
        }
    }
}

impl ConstraintThresholds {
    pub fn validate(&self) -> Result<(), DomainError> {
        let all = [
            self.max_total_density,
            self.max_acute_density,
            self.max_rehab_ltc_density,
            self.max_hospitalization_rate,
            self.min_dh_admission_share,
            self.min_dh_bed_share,
        ];
        if all.iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(DomainError::InvalidParameter {
                name: "thresholds",
                reason: "every threshold must be positive".into(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    TotalDensity,
    AcuteDensity,
    RehabLtcDensity,
    HospitalizationRate,
    DhAdmissionShare,
    DhBedShare,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::TotalDensity,
        CheckKind::AcuteDensity,
        CheckKind::RehabLtcDensity,
        CheckKind::HospitalizationRate,
        CheckKind::DhAdmissionShare,
        CheckKind::DhBedShare,
    ];

    pub fn is_floor(self) -> bool {
        matches!(self, CheckKind::DhAdmissionShare | CheckKind::DhBedShare)
    }

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::TotalDensity => "total_density",
            CheckKind::AcuteDensity => "acute_density",
            CheckKind::RehabLtcDensity => "rehab_ltc_density",
            CheckKind::HospitalizationRate => "hospitalization_rate",
            CheckKind::DhAdmissionShare => "dh_admission_share",
            CheckKind::DhBedShare => "dh_bed_share",
        }
    }

    fn threshold(self, t: &ConstraintThresholds) -> f64 {
        match self {
            CheckKind::TotalDensity => t.max_total_density,
            CheckKind::AcuteDensity => t.max_acute_density,
            CheckKind::RehabLtcDensity => t.max_rehab_ltc_density,
            CheckKind::HospitalizationRate => t.max_hospitalization_rate,
            CheckKind::DhAdmissionShare => t.min_dh_admission_share,
            CheckKind::DhBedShare => t.min_dh_bed_share,
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The measured ratio is 0/0.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: CheckKind,
    pub measured: Option<f64>,
    pub threshold: f64,
    pub status: CheckStatus,
    /// `measured - threshold`. Negative is headroom for caps, positive is
    /// headroom for floors.
    pub margin: Option<f64>,
    /// False when an input to the check is an estimate.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub checks: Vec<CheckResult>,
    pub overall_pass: bool,
    /// Admissions per 1,000 residents with mobility netted out: residents
    /// treated elsewhere are added back, non-residents removed.
    pub resident_demand_rate: f64,
}

impl ComplianceReport {
    pub fn check(&self, kind: CheckKind) -> &CheckResult {
        self.checks
            .iter()
            .find(|c| c.check == kind)
            .expect("every report carries all six checks")
    }

    pub fn failing(&self) -> Vec<CheckKind> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.check)
            .collect()
    }
}

/// Beds per regime, fractional so that computed networks can be checked
/// before rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkBeds {
    pub acute_ro: f64,
    pub acute_dh: f64,
    pub rehab_ro: f64,
    pub rehab_dh: f64,
    pub ltc: f64,
    /// Part of the DH/RO split is estimated rather than reported.
    #[serde(default)]
    pub estimated_split: bool,
}

impl NetworkBeds {
    pub fn from_inventory(inv: &BedInventory) -> Self {
        let sum = |care: CareType, regime: Option<Regime>| {
            inv.total_where(|k| k.care == care && regime.is_none_or(|r| k.regime == r)) as f64
        };
        NetworkBeds {
            acute_ro: sum(CareType::Acute, Some(Regime::Ro)),
            acute_dh: sum(CareType::Acute, Some(Regime::Dh)),
            rehab_ro: sum(CareType::Rehab, Some(Regime::Ro)),
            rehab_dh: sum(CareType::Rehab, Some(Regime::Dh)),
            ltc: sum(CareType::Ltc, None),
            estimated_split: inv.iter().any(|(_, _, p)| p != Provenance::Reported),
        }
    }

    pub fn acute(&self) -> f64 {
        self.acute_ro + self.acute_dh
    }

    pub fn rehab_ltc(&self) -> f64 {
        self.rehab_ro + self.rehab_dh + self.ltc
    }

    pub fn total(&self) -> f64 {
        self.acute() + self.rehab_ltc()
    }

    pub fn dh(&self) -> f64 {
        self.acute_dh + self.rehab_dh
    }
}

/// Admissions per regime.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RegimeAdmissions {
    pub acute_ro: f64,
    pub acute_dh: f64,
    pub rehab_ro: f64,
    pub rehab_dh: f64,
    pub ltc: f64,
}

impl RegimeAdmissions {
    pub fn total(&self) -> f64 {
        self.acute_ro + self.acute_dh + self.rehab_ro + self.rehab_dh + self.ltc
    }

    pub fn dh(&self) -> f64 {
        self.acute_dh + self.rehab_dh
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if den == 0.0 {
        if num == 0.0 {
            None
        } else {
            Some(f64::INFINITY)
        }
    } else {
        Some(num / den)
    }
}

pub fn evaluate(
    beds: &NetworkBeds,
    admissions: &RegimeAdmissions,
    pop: &Population,
    thresholds: &ConstraintThresholds,
) -> Result<ComplianceReport, DomainError> {
    let per_k = |v: f64| pop.per_thousand(v);
    let measured = |kind: CheckKind| -> Result<Option<f64>, DomainError> {
        Ok(match kind {
            CheckKind::TotalDensity => Some(per_k(beds.total())?),
            CheckKind::AcuteDensity => Some(per_k(beds.acute())?),
            CheckKind::RehabLtcDensity => Some(per_k(beds.rehab_ltc())?),
            CheckKind::HospitalizationRate => Some(per_k(admissions.total())?),
            CheckKind::DhAdmissionShare => ratio(admissions.dh(), admissions.total()),
            CheckKind::DhBedShare => ratio(beds.dh(), beds.total()),
        })
    };
    let mut checks = Vec::with_capacity(6);
    for kind in CheckKind::ALL {
        let threshold = kind.threshold(thresholds);
        let value = measured(kind)?;
        let status = match value {
            None => CheckStatus::NotApplicable,
            Some(v) if kind.is_floor() && v >= threshold => CheckStatus::Pass,
            Some(v) if !kind.is_floor() && v <= threshold => CheckStatus::Pass,
            Some(_) => CheckStatus::Fail,
        };
        checks.push(CheckResult {
            check: kind,
            measured: value,
            threshold,
            status,
            margin: value.map(|v| v - threshold),
            complete: !(kind == CheckKind::DhBedShare && beds.estimated_split),
        });
    }
    let overall_pass = checks.iter().all(|c| c.status != CheckStatus::Fail);
    let resident_admissions = admissions.total() - pop.inflow_admissions as f64
        + pop.outflow_admissions as f64;
    Ok(ComplianceReport {
        checks,
        overall_pass,
        resident_demand_rate: per_k(resident_admissions)?,
    })
}
