//! Annual-average supply/demand equilibrium.
//!
//! Ordinary beds supply `beta * beds * ro_service_days` bed-days per year; a
//! DH bed supplies `beta * turnover * correction * dh_service_days` accesses.
//! At equilibrium
//!
//! ```text
//! beta * (ro_beds + dh_beds) = dh_accesses / (A * f * 250) + ro_days / 365
//! ```

use serde::{Deserialize, Serialize};

use crate::error::DomainError;
use crate::model::{DhParameters, RateSet};

/// Post-reallocation demand volumes, per year.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DemandAggregate {
    pub ro_days: f64,
    pub dh_accesses: f64,
    pub ro_admissions: f64,
    pub dh_admissions: f64,
    pub ambul_services: f64,
    pub rsa_days: f64,
    pub rehab_days: f64,
    pub avoided_admissions: f64,
}

impl DemandAggregate {
    /// Hospital admissions, RO and DH.
    pub fn admissions(&self) -> f64 {
        self.ro_admissions + self.dh_admissions
    }

    pub fn scaled(&self, k: f64) -> Self {
        DemandAggregate {
            ro_days: self.ro_days * k,
            dh_accesses: self.dh_accesses * k,
            ro_admissions: self.ro_admissions * k,
            dh_admissions: self.dh_admissions * k,
            ambul_services: self.ambul_services * k,
            rsa_days: self.rsa_days * k,
            rehab_days: self.rehab_days * k,
            avoided_admissions: self.avoided_admissions * k,
        }
    }

    pub(crate) fn add(&mut self, o: &DemandAggregate) {
        self.ro_days += o.ro_days;
        self.dh_accesses += o.dh_accesses;
        self.ro_admissions += o.ro_admissions;
        self.dh_admissions += o.dh_admissions;
        self.ambul_services += o.ambul_services;
        self.rsa_days += o.rsa_days;
        self.rehab_days += o.rehab_days;
        self.avoided_admissions += o.avoided_admissions;
    }
}

/// Fractional bed counts; rounding happens only when reporting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BedRequirement {
    pub ro_beds: f64,
    pub dh_beds: f64,
}

impl BedRequirement {
    pub fn total(&self) -> f64 {
        self.ro_beds + self.dh_beds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSolution {
    pub beta: f64,
    pub over_capacity: bool,
}

fn check_beta(beta: f64) -> Result<(), DomainError> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(DomainError::NonPositiveBeta(beta))
    }
}

pub fn required_ro_beds(ro_days: f64, beta: f64, params: &DhParameters) -> Result<f64, DomainError> {
    check_beta(beta)?;
    Ok(ro_days / (params.ro_service_days * beta))
}

pub fn required_dh_beds(
    dh_accesses: f64,
    beta: f64,
    params: &DhParameters,
) -> Result<f64, DomainError> {
    check_beta(beta)?;
    Ok(dh_accesses / (params.turnover * params.dh_service_days * beta) / params.correction)
}

pub fn required_beds(
    demand: &DemandAggregate,
    beta: f64,
    params: &DhParameters,
) -> Result<BedRequirement, DomainError> {
    Ok(BedRequirement {
        ro_beds: required_ro_beds(demand.ro_days, beta, params)?,
        dh_beds: required_dh_beds(demand.dh_accesses, beta, params)?,
    })
}

/// Bed-equivalents of demand at full utilization: the right-hand side of
/// the equilibrium.
pub fn full_utilization_beds(demand: &DemandAggregate, params: &DhParameters) -> f64 {
    demand.dh_accesses / (params.turnover * params.correction * params.dh_service_days)
        + demand.ro_days / params.ro_service_days
}

/// Utilization that balances `demand` against `total_beds`.
pub fn solve_beta(
    demand: &DemandAggregate,
    total_beds: f64,
    params: &DhParameters,
) -> Result<BetaSolution, DomainError> {
    if !(total_beds > 0.0 && total_beds.is_finite()) {
        return Err(DomainError::NonPositiveBeds(total_beds));
    }
    let beta = full_utilization_beds(demand, params) / total_beds;
    Ok(BetaSolution {
        beta,
        over_capacity: beta > 1.0,
    })
}

/// Rates observed on an existing network.
pub fn observed_rates(
    admissions: f64,
    total_days: f64,
    beds: f64,
    residents: f64,
    params: &DhParameters,
) -> Result<RateSet, DomainError> {
    if !(residents > 0.0) {
        return Err(DomainError::NonPositivePopulation);
    }
    if !(beds > 0.0) {
        return Err(DomainError::NonPositiveBeds(beds));
    }
    Ok(RateSet {
        alpha: admissions / residents,
        beta: total_days / (params.ro_service_days * beds),
        density: beds / residents,
        mean_stay: if admissions == 0.0 {
            0.0
        } else {
            total_days / admissions
        },
    })
}
