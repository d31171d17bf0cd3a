//! Pricing of bed changes and substituted services, and the unit staffing rule.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::equilibrium::DemandAggregate;

/// Whole euros.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(pub i64);

impl Money {
    /// Round half-up to whole euros.
    pub fn from_euros(amount: f64) -> Self {
        Money((amount + 0.5).floor() as i64)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, o: Money) -> Money {
        Money(self.0 + o.0)
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, o: Money) -> Money {
        Money(self.0 - o.0)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Annual cost per bed by care type, and the unit cost of an ambulatory
/// service. DH beds are priced as acute beds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModel {
    pub acute_bed_pa: f64,
    pub rehab_ltc_bed_pa: f64,
    pub rsa_bed_pa: f64,
    pub ambulatory_service: f64,
    pub rsa_days_per_bed: f64,
}

impl CostModel {
    pub const ACUTE_BED_PA: f64 = 250_000.0;
    pub const REHAB_SHARE_OF_ACUTE: f64 = 0.65;
    pub const RSA_SHARE_OF_ACUTE: f64 = 0.30;

    /// Rehab/LTC and RSA beds priced at their usual share of an acute bed.
    pub fn from_acute(acute_bed_pa: f64, ambulatory_service: f64) -> Self {
        CostModel {
            acute_bed_pa,
            rehab_ltc_bed_pa: acute_bed_pa * Self::REHAB_SHARE_OF_ACUTE,
            rsa_bed_pa: acute_bed_pa * Self::RSA_SHARE_OF_ACUTE,
            ambulatory_service,
            rsa_days_per_bed: 365.0,
        }
    }

    pub fn validate(&self) -> Result<(), crate::error::DomainError> {
        let all = [
            self.acute_bed_pa,
            self.rehab_ltc_bed_pa,
            self.rsa_bed_pa,
            self.ambulatory_service,
            self.rsa_days_per_bed,
        ];
        if all.iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(crate::error::DomainError::InvalidParameter {
                name: "costs",
                reason: "every cost must be positive".into(),
            })
        }
    }
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::from_acute(Self::ACUTE_BED_PA, 200.0)
    }
}

/// Beds by priced care type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CareBeds {
    pub acute: f64,
    pub rehab_ltc: f64,
}

/// Annual savings of moving from `before` to `after`, net of the new
/// ambulatory services and RSA capacity. Positive means savings.
pub fn bed_delta_pnl(
    before: &CareBeds,
    after: &CareBeds,
    demand: &DemandAggregate,
    costs: &CostModel,
) -> Money {
    let beds = (before.acute - after.acute) * costs.acute_bed_pa
        + (before.rehab_ltc - after.rehab_ltc) * costs.rehab_ltc_bed_pa;
    let ambul = demand.ambul_services * costs.ambulatory_service;
    let rsa = demand.rsa_days / costs.rsa_days_per_bed * costs.rsa_bed_pa;
    Money::from_euros(beds - ambul - rsa)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Staffing {
    pub doctors: u32,
    pub nurses: u32,
}

pub const STAFFING_BLOCK_BEDS: u32 = 20;

/// Staff for a clinical unit: the first 20-bed block needs 6 doctors and 16
/// nurses, every further started block 3 doctors and 16 nurses.
pub fn staffing_estimate(unit_beds: u32) -> Staffing {
    let blocks = unit_beds.div_ceil(STAFFING_BLOCK_BEDS);
    if blocks == 0 {
        return Staffing {
            doctors: 0,
            nurses: 0,
        };
    }
    Staffing {
        doctors: 6 + 3 * (blocks - 1),
        nurses: 16 * blocks,
    }
}
