use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equilibrium::DemandAggregate;
use crate::ingest::LeaClassifier;
use crate::model::DrgTable;

/// Appropriateness class of a DRG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DemandClass {
    #[serde(rename = "LEA45")]
    Lea45,
    #[serde(rename = "LEA45+")]
    Lea45Plus,
    #[serde(rename = "OTHER")]
    Other,
}

impl DemandClass {
    pub const ALL: [DemandClass; 3] = [DemandClass::Lea45, DemandClass::Lea45Plus, DemandClass::Other];
}

impl fmt::Display for DemandClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DemandClass::Lea45 => "LEA45",
            DemandClass::Lea45Plus => "LEA45+",
            DemandClass::Other => "OTHER",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bucket {
    /// Day-hospital admissions; days are accesses.
    Dh,
    /// One-day ordinary admissions.
    Ro1dMinus,
    /// Multi-day ordinary admissions.
    Ro1dPlus,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub admissions: f64,
    pub days: f64,
}

impl Cell {
    fn add(&mut self, admissions: f64, days: f64) {
        self.admissions += admissions;
        self.days += days;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassDemand {
    pub dh: Cell,
    pub ro_1d_minus: Cell,
    pub ro_1d_plus: Cell,
    /// Days of multi-day admissions beyond the DRG threshold; a subset of
    /// `ro_1d_plus.days`.
    pub days_above_threshold: f64,
    /// False when the source has no DH rows for this class.
    pub dh_available: bool,
}

impl ClassDemand {
    pub fn cell(&self, bucket: Bucket) -> &Cell {
        match bucket {
            Bucket::Dh => &self.dh,
            Bucket::Ro1dMinus => &self.ro_1d_minus,
            Bucket::Ro1dPlus => &self.ro_1d_plus,
        }
    }

    pub fn cell_mut(&mut self, bucket: Bucket) -> &mut Cell {
        match bucket {
            Bucket::Dh => &mut self.dh,
            Bucket::Ro1dMinus => &mut self.ro_1d_minus,
            Bucket::Ro1dPlus => &mut self.ro_1d_plus,
        }
    }

    fn scale(&mut self, k: f64) {
        for c in [&mut self.dh, &mut self.ro_1d_minus, &mut self.ro_1d_plus] {
            c.admissions *= k;
            c.days *= k;
        }
        self.days_above_threshold *= k;
    }
}

/// Demand by class and bucket, plus whatever the applied steps have moved
/// out of the hospital buckets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratifiedDemand {
    pub lea45: ClassDemand,
    pub lea45plus: ClassDemand,
    pub other: ClassDemand,
    /// Demand created by each step, indexed by step id - 1. Kept per step so
    /// that the aggregate is summed in a fixed order whatever order the steps
    /// ran in.
    pub diverted: [DemandAggregate; 7],
}

impl StratifiedDemand {
    pub fn empty() -> Self {
        StratifiedDemand {
            lea45: ClassDemand::default(),
            lea45plus: ClassDemand::default(),
            other: ClassDemand::default(),
            diverted: [DemandAggregate::default(); 7],
        }
    }

    pub fn class(&self, c: DemandClass) -> &ClassDemand {
        match c {
            DemandClass::Lea45 => &self.lea45,
            DemandClass::Lea45Plus => &self.lea45plus,
            DemandClass::Other => &self.other,
        }
    }

    pub fn class_mut(&mut self, c: DemandClass) -> &mut ClassDemand {
        match c {
            DemandClass::Lea45 => &mut self.lea45,
            DemandClass::Lea45Plus => &mut self.lea45plus,
            DemandClass::Other => &mut self.other,
        }
    }

    /// Multiply every volume by `k`; used for the demand-scaling knob.
    pub fn scale(&mut self, k: f64) {
        for c in DemandClass::ALL {
            self.class_mut(c).scale(k);
        }
        for d in &mut self.diverted {
            *d = d.scaled(k);
        }
    }

    /// Hospital and diverted volumes in aggregate form.
    pub fn aggregate(&self) -> DemandAggregate {
        let mut agg = DemandAggregate::default();
        for c in DemandClass::ALL {
            let cd = self.class(c);
            agg.ro_admissions += cd.ro_1d_minus.admissions + cd.ro_1d_plus.admissions;
            agg.ro_days += cd.ro_1d_minus.days + cd.ro_1d_plus.days;
            agg.dh_admissions += cd.dh.admissions;
            agg.dh_accesses += cd.dh.days;
        }
        for d in &self.diverted {
            agg.add(d);
        }
        agg
    }
}

/// Split RO (and optionally DH) tables into class x bucket cells.
///
/// One-day admissions go to RO1d- with one day each; the rest of the row
/// goes to RO1d+. A class has DH data only when the DH table is present and
/// has at least one row of that class.
pub fn stratify(
    ro_table: &DrgTable,
    dh_table: Option<&DrgTable>,
    classifier: &LeaClassifier,
) -> StratifiedDemand {
    let mut out = StratifiedDemand::empty();
    for r in &ro_table.records {
        let cd = out.class_mut(classifier.classify(&r.code));
        let one_day = r.one_day_admissions as f64;
        cd.ro_1d_minus.add(one_day, one_day);
        cd.ro_1d_plus
            .add(r.multi_day_admissions() as f64, r.multi_day_days() as f64);
        cd.days_above_threshold += r.days_above_threshold as f64;
    }
    if let Some(dh) = dh_table {
        for r in &dh.records {
            let cd = out.class_mut(classifier.classify(&r.code));
            cd.dh.add(r.admissions as f64, r.total_days as f64);
            cd.dh_available = true;
        }
    }
    out
}
