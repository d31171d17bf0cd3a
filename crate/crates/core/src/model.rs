//! Value types shared across the engine.
//!
//! Counts are integers, rates and fractions are `f64`. Nothing here performs
//! I/O; [`validate_dataset`] reports invariant breaches as data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DrgKind {
    Medical,
    Surgical,
}

impl DrgKind {
    /// Source tables flag medical DRGs with `M` and surgical ones with `C`.
    pub fn flag(self) -> &'static str {
        match self {
            DrgKind::Medical => "M",
            DrgKind::Surgical => "C",
        }
    }
}

/// One row of a per-DRG admission table.
///
/// The four `pct_*` columns are the published admission-length distribution
/// (percent, one decimal in the source). They are kept for cross-checks only;
/// the engine works from the counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrgRecord {
    pub code: String,
    pub kind: DrgKind,
    pub admissions: u64,
    pub total_days: u64,
    pub mean_days: f64,
    pub mean_days_below_threshold: f64,
    pub threshold_days: u32,
    pub one_day_admissions: u64,
    pub pct_one_day: f64,
    pub pct_two_three_days: f64,
    pub pct_four_days_to_threshold: f64,
    pub pct_above_threshold: f64,
    pub days_above_threshold: u64,
}

impl DrgRecord {
    /// A record with the derived columns filled in from the counts.
    pub fn from_counts(
        code: impl Into<String>,
        kind: DrgKind,
        admissions: u64,
        total_days: u64,
        one_day_admissions: u64,
        threshold_days: u32,
        days_above_threshold: u64,
    ) -> Self {
        let mean = if admissions == 0 {
            0.0
        } else {
            total_days as f64 / admissions as f64
        };
        let pct_one_day = if admissions == 0 {
            0.0
        } else {
            one_day_admissions as f64 * 100.0 / admissions as f64
        };
        DrgRecord {
            code: code.into(),
            kind,
            admissions,
            total_days,
            mean_days: mean,
            mean_days_below_threshold: mean,
            threshold_days,
            one_day_admissions,
            pct_one_day,
            pct_two_three_days: 0.0,
            pct_four_days_to_threshold: 100.0 - pct_one_day,
            pct_above_threshold: 0.0,
            days_above_threshold,
        }
    }

    pub fn above_threshold_share(&self) -> f64 {
        self.pct_above_threshold / 100.0
    }

    pub fn multi_day_admissions(&self) -> u64 {
        self.admissions.saturating_sub(self.one_day_admissions)
    }

    /// Days of the multi-day admissions: every one-day admission counts one day.
    pub fn multi_day_days(&self) -> u64 {
        self.total_days.saturating_sub(self.one_day_admissions)
    }
}

/// Admission regime covered by a DRG table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableRegime {
    /// Acute ordinary admissions; days are bed-days.
    AcuteRo,
    /// Acute day-hospital admissions; days are DH accesses.
    AcuteDh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrgTable {
    pub year: String,
    pub regime: TableRegime,
    pub records: Vec<DrgRecord>,
}

impl DrgTable {
    pub fn new(year: impl Into<String>, regime: TableRegime) -> Self {
        DrgTable {
            year: year.into(),
            regime,
            records: Vec::new(),
        }
    }

    pub fn total_admissions(&self) -> u64 {
        self.records.iter().map(|r| r.admissions).sum()
    }

    pub fn total_days(&self) -> u64 {
        self.records.iter().map(|r| r.total_days).sum()
    }

    /// Restriction of the table to the given codes, preserving row order.
    pub fn subset(&self, codes: &BTreeSet<String>) -> DrgTable {
        DrgTable {
            year: self.year.clone(),
            regime: self.regime,
            records: self
                .records
                .iter()
                .filter(|r| codes.contains(&r.code))
                .cloned()
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Public,
    Private,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "RO")]
    Ro,
    #[serde(rename = "DH")]
    Dh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CareType {
    Acute,
    Rehab,
    Ltc,
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Public => "public",
            Sector::Private => "private",
        })
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Ro => "RO",
            Regime::Dh => "DH",
        })
    }
}

impl fmt::Display for CareType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CareType::Acute => "acute",
            CareType::Rehab => "rehab",
            CareType::Ltc => "ltc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BedKey {
    pub sector: Sector,
    pub regime: Regime,
    pub care: CareType,
}

impl BedKey {
    pub fn new(sector: Sector, regime: Regime, care: CareType) -> Self {
        BedKey {
            sector,
            regime,
            care,
        }
    }
}

impl fmt::Display for BedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{};{}", self.sector, self.regime, self.care)
    }
}

/// Where a bed count came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Reported,
    Estimated,
    /// Awaiting an estimate; under assumption A the private RO entry still
    /// holds the combined DH+RO total.
    EstimatedPending,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BedEntry {
    pub sector: Sector,
    pub regime: Regime,
    pub care: CareType,
    pub count: i64,
    pub provenance: Provenance,
}

/// Bed counts keyed by sector, regime and care type.
///
/// Counts are signed so that a corrupt inventory is representable and can be
/// reported by [`validate_dataset`]; the parser never produces negatives.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<BedEntry>", into = "Vec<BedEntry>")]
pub struct BedInventory {
    entries: BTreeMap<BedKey, (i64, Provenance)>,
}

impl From<Vec<BedEntry>> for BedInventory {
    fn from(v: Vec<BedEntry>) -> Self {
        let mut inv = BedInventory::default();
        for e in v {
            inv.set(BedKey::new(e.sector, e.regime, e.care), e.count, e.provenance);
        }
        inv
    }
}

impl From<BedInventory> for Vec<BedEntry> {
    fn from(inv: BedInventory) -> Self {
        inv.iter()
            .map(|(k, count, provenance)| BedEntry {
                sector: k.sector,
                regime: k.regime,
                care: k.care,
                count,
                provenance,
            })
            .collect()
    }
}

impl BedInventory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: BedKey, count: i64, provenance: Provenance) {
        self.entries.insert(key, (count, provenance));
    }

    pub fn get(&self, key: BedKey) -> i64 {
        self.entries.get(&key).map_or(0, |e| e.0)
    }

    pub fn provenance(&self, key: BedKey) -> Option<Provenance> {
        self.entries.get(&key).map(|e| e.1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (BedKey, i64, Provenance)> + '_ {
        self.entries.iter().map(|(k, (c, p))| (*k, *c, *p))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum over every entry matching the filter.
    pub fn total_where(&self, mut pred: impl FnMut(BedKey) -> bool) -> i64 {
        self.iter().filter(|(k, _, _)| pred(*k)).map(|(_, c, _)| c).sum()
    }

    pub fn total(&self) -> i64 {
        self.total_where(|_| true)
    }

    pub fn care_total(&self, care: CareType) -> i64 {
        self.total_where(|k| k.care == care)
    }

    pub fn has_non_reported(&self) -> bool {
        self.iter().any(|(_, _, p)| p != Provenance::Reported)
    }
}

/// Admissions of regimes outside the acute DRG tables: rehabilitation (RO
/// and DH) and long-term care.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NonAcuteActivity {
    pub rehab_ro_admissions: f64,
    pub rehab_dh_admissions: f64,
    pub ltc_admissions: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub residents: u64,
    /// Admissions of non-residents treated in the region (positive mobility).
    #[serde(default)]
    pub inflow_admissions: u64,
    /// Admissions of residents treated elsewhere (negative mobility).
    #[serde(default)]
    pub outflow_admissions: u64,
}

impl Population {
    pub fn new(residents: u64) -> Self {
        Population {
            residents,
            inflow_admissions: 0,
            outflow_admissions: 0,
        }
    }

    pub fn per_thousand(&self, value: f64) -> Result<f64, DomainError> {
        if self.residents == 0 {
            return Err(DomainError::NonPositivePopulation);
        }
        Ok(value * 1000.0 / self.residents as f64)
    }
}

/// Hospitalization rate, utilization, bed density and mean stay.
///
/// `alpha` and `density` are per resident; multiply by 1,000 for the usual
/// reporting unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub alpha: f64,
    pub beta: f64,
    pub density: f64,
    pub mean_stay: f64,
}

impl RateSet {
    /// Utilization above 100% is a legal value that signals an
    /// under-bedded network; it is never clamped.
    pub fn over_capacity(&self) -> bool {
        self.beta > 1.0
    }
}

/// Day-hospital conversion parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DhParameters {
    /// Patients served per DH bed per day.
    pub turnover: f64,
    pub accesses_per_admission: f64,
    /// Utilization correction applied when estimating an existing DH stock.
    pub correction: f64,
    pub dh_service_days: f64,
    pub ro_service_days: f64,
}

impl Default for DhParameters {
    fn default() -> Self {
        DhParameters {
            turnover: 2.0,
            accesses_per_admission: 2.0,
            correction: 1.0,
            dh_service_days: 250.0,
            ro_service_days: 365.0,
        }
    }
}

impl DhParameters {
    pub const STOCK_CORRECTION: f64 = 0.75;

    pub fn with_correction(self, correction: f64) -> Self {
        DhParameters { correction, ..self }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let bad = |name, reason: &str| {
            Err(DomainError::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if !(self.turnover >= 1.0) {
            return bad("turnover", "must be at least 1");
        }
        if !(self.accesses_per_admission >= 1.0) {
            return bad("accesses_per_admission", "must be at least 1");
        }
        if !(self.correction > 0.0 && self.correction <= 1.0) {
            return bad("correction", "must lie in (0, 1]");
        }
        if !(self.dh_service_days > 0.0 && self.ro_service_days > 0.0) {
            return bad("service_days", "must be positive");
        }
        Ok(())
    }
}

/// An invariant breach found by [`validate_dataset`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub locator: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.locator, self.message)
    }
}

/// Percentage points allowed between a published share and the counts.
pub const SHARE_TOLERANCE_PP: f64 = 0.5;

pub fn validate_table(table: &DrgTable, out: &mut Vec<Violation>) {
    let mut seen = BTreeSet::new();
    for r in &table.records {
        let loc = format!("drg {}", r.code);
        let mut push = |msg: String| {
            out.push(Violation {
                locator: loc.clone(),
                message: msg,
            })
        };
        if !seen.insert(r.code.as_str()) {
            push("duplicate DRG code".into());
        }
        if r.one_day_admissions > r.admissions {
            push(format!(
                "one-day admissions {} exceed admissions {}",
                r.one_day_admissions, r.admissions
            ));
        }
        if r.total_days < r.admissions {
            push(format!(
                "total days {} below admissions {}",
                r.total_days, r.admissions
            ));
        }
        if r.days_above_threshold > r.total_days {
            push(format!(
                "days above threshold {} exceed total days {}",
                r.days_above_threshold, r.total_days
            ));
        } else if r.days_above_threshold > r.multi_day_days() {
            push(format!(
                "days above threshold {} exceed multi-day days {}",
                r.days_above_threshold,
                r.multi_day_days()
            ));
        }
        if r.threshold_days < 1 {
            push("threshold must be at least 1 day".into());
        }
        let pcts = [
            r.pct_one_day,
            r.pct_two_three_days,
            r.pct_four_days_to_threshold,
            r.pct_above_threshold,
        ];
        if pcts.iter().any(|p| !(0.0..=100.0).contains(p)) {
            push("percentage column outside 0-100".into());
        }
        if r.admissions > 0 {
            let expected = r.one_day_admissions as f64 * 100.0 / r.admissions as f64;
            if (expected - r.pct_one_day).abs() > SHARE_TOLERANCE_PP + 1e-9 {
                push(format!(
                    "published one-day share {}% disagrees with counts ({expected:.2}%)",
                    r.pct_one_day
                ));
            }
            let sum: f64 = pcts.iter().sum();
            if (sum - 100.0).abs() > SHARE_TOLERANCE_PP + 1e-9 {
                push(format!("length-of-stay shares sum to {sum}%, not 100%"));
            }
        }
    }
}

/// Every invariant breach of the dataset, sorted by locator.
pub fn validate_dataset(
    table: &DrgTable,
    beds: &BedInventory,
    pop: &Population,
) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_table(table, &mut out);
    for (key, count, _) in beds.iter() {
        if count < 0 {
            out.push(Violation {
                locator: format!("beds {key}"),
                message: format!("negative bed count {count}"),
            });
        }
    }
    if pop.residents == 0 {
        out.push(Violation {
            locator: "population".into(),
            message: "residents must be positive".into(),
        });
    }
    out.sort();
    out
}
