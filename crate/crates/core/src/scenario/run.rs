use serde::{Deserialize, Serialize};

use crate::constraints::{self, ComplianceReport, ConstraintThresholds, NetworkBeds, RegimeAdmissions};
use crate::equilibrium::{self, BedRequirement, DemandAggregate};
use crate::error::{DomainError, ScenarioError};
use crate::finance::{self, CareBeds, CostModel, Money};
use crate::ingest::LeaClassifier;
use crate::model::{BedInventory, DhParameters, DrgTable, NonAcuteActivity, Population, RateSet};

use super::spec::{ScenarioSpec, SolveMode};
use super::steps::apply_step;
use super::stratify::{stratify, StratifiedDemand};

/// Everything a scenario run reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub ro_table: DrgTable,
    pub dh_table: Option<DrgTable>,
    pub classifier: LeaClassifier,
    pub beds: BedInventory,
    pub population: Population,
    #[serde(default)]
    pub non_acute: NonAcuteActivity,
    /// Planning parameters; the DH correction stays at 1.
    #[serde(default)]
    pub params: DhParameters,
}

impl Dataset {
    pub fn stratified(&self) -> StratifiedDemand {
        stratify(&self.ro_table, self.dh_table.as_ref(), &self.classifier)
    }

    pub fn current_beds(&self) -> NetworkBeds {
        NetworkBeds::from_inventory(&self.beds)
    }

    pub fn current_admissions(&self) -> RegimeAdmissions {
        regime_admissions(&self.stratified().aggregate(), &self.non_acute, 1.0)
    }

    /// Compliance of the network as it stands.
    pub fn current_compliance(
        &self,
        thresholds: &ConstraintThresholds,
    ) -> Result<ComplianceReport, DomainError> {
        constraints::evaluate(
            &self.current_beds(),
            &self.current_admissions(),
            &self.population,
            thresholds,
        )
    }
}

fn regime_admissions(agg: &DemandAggregate, non_acute: &NonAcuteActivity, scale: f64) -> RegimeAdmissions {
    RegimeAdmissions {
        acute_ro: agg.ro_admissions,
        acute_dh: agg.dh_admissions,
        rehab_ro: non_acute.rehab_ro_admissions * scale,
        rehab_dh: non_acute.rehab_dh_admissions * scale,
        ltc: non_acute.ltc_admissions * scale,
    }
}

/// Signed bed changes, after minus before. Negative is a cut.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BedDelta {
    pub acute: f64,
    pub rehab_ltc: f64,
    pub total: f64,
}

/// Rates and acute density after each applied step, for plotting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    /// Step just applied; `None` for the starting point.
    pub after_step: Option<u8>,
    pub alpha_per_thousand: f64,
    pub beta: f64,
    pub acute_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub initial_demand: DemandAggregate,
    pub demand: DemandAggregate,
    pub acute_beds: BedRequirement,
    pub rehab_ltc_beds: f64,
    pub current_acute_beds: f64,
    pub current_rehab_ltc_beds: f64,
    pub rates: RateSet,
    pub over_capacity: bool,
    pub alpha_per_thousand: f64,
    pub acute_density: f64,
    pub rehab_ltc_density: f64,
    pub total_density: f64,
    /// Acute beds over all beds after restructuring.
    pub acute_share: f64,
    pub bed_delta: BedDelta,
    pub compliance: ComplianceReport,
    pub pnl: Money,
    pub trajectory: Vec<TrajectoryPoint>,
}

fn infeasible(e: DomainError) -> ScenarioError {
    ScenarioError::Infeasible(e.to_string())
}

struct Sizing {
    beta: f64,
    beds: BedRequirement,
}

fn size_acute(
    demand: &DemandAggregate,
    mode: SolveMode,
    observed_beta: Option<f64>,
    residents: f64,
    params: &DhParameters,
) -> Result<Sizing, ScenarioError> {
    let beta = match mode {
        SolveMode::FixedBeta { beta } => beta,
        SolveMode::ObservedBeta => observed_beta.expect("computed for observed mode"),
        SolveMode::FixedDensity { acute_density } => {
            let total = acute_density * residents / 1000.0;
            equilibrium::solve_beta(demand, total, params)
                .map_err(infeasible)?
                .beta
        }
    };
    let beds = equilibrium::required_beds(demand, beta, params).map_err(infeasible)?;
    Ok(Sizing { beta, beds })
}

/// Run one scenario: stratify, apply the included steps in id order, size
/// the network, then check compliance and price the bed changes.
pub fn run_scenario(
    dataset: &Dataset,
    spec: &ScenarioSpec,
    thresholds: &ConstraintThresholds,
    costs: &CostModel,
) -> Result<ScenarioOutcome, ScenarioError> {
    spec.validate()?;
    let params = &dataset.params;
    let pop = &dataset.population;
    if pop.residents == 0 {
        return Err(DomainError::NonPositivePopulation.into());
    }
    let residents = pop.residents as f64;
    let current = dataset.current_beds();
    let current_acute = current.acute();
    let current_rehab = current.rehab_ltc();

    let start = dataset.stratified();
    let observed_beta = match spec.solve {
        SolveMode::ObservedBeta => Some(
            equilibrium::solve_beta(&start.aggregate(), current_acute, params)
                .map_err(infeasible)?
                .beta,
        ),
        _ => None,
    };

    let mut demand = start;
    demand.scale(spec.demand_scale);
    let initial = demand.aggregate();
    let non_acute_total = (dataset.non_acute.rehab_ro_admissions
        + dataset.non_acute.rehab_dh_admissions
        + dataset.non_acute.ltc_admissions)
        * spec.demand_scale;

    let point = |after_step, agg: &DemandAggregate| -> Result<TrajectoryPoint, ScenarioError> {
        let s = size_acute(agg, spec.solve, observed_beta, residents, params)?;
        Ok(TrajectoryPoint {
            after_step,
            alpha_per_thousand: (agg.admissions() + non_acute_total) * 1000.0 / residents,
            beta: s.beta,
            acute_density: s.beds.total() * 1000.0 / residents,
        })
    };
    let mut trajectory = vec![point(None, &initial)?];
    for rule in spec.rules() {
        demand = apply_step(&demand, &rule, params)?.0;
        trajectory.push(point(Some(rule.id), &demand.aggregate())?);
    }
    let agg = demand.aggregate();
    let Sizing { beta, beds } = size_acute(&agg, spec.solve, observed_beta, residents, params)?;

    let rehab_base = match spec.rehab_ltc_density {
        Some(d) => d * residents / 1000.0,
        None => current_rehab,
    };
    let rehab_after = rehab_base
        + equilibrium::required_ro_beds(agg.rehab_days, beta, params).map_err(infeasible)?;

    let (rehab_ro, rehab_dh, ltc) = if current_rehab > 0.0 {
        let k = rehab_after / current_rehab;
        (current.rehab_ro * k, current.rehab_dh * k, current.ltc * k)
    } else {
        (rehab_after, 0.0, 0.0)
    };
    let network = NetworkBeds {
        acute_ro: beds.ro_beds,
        acute_dh: beds.dh_beds,
        rehab_ro,
        rehab_dh,
        ltc,
        estimated_split: false,
    };
    let admissions = regime_admissions(&agg, &dataset.non_acute, spec.demand_scale);
    let compliance = constraints::evaluate(&network, &admissions, pop, thresholds)?;

    let acute_after = beds.total();
    let total_after = network.total();
    let pnl = finance::bed_delta_pnl(
        &CareBeds {
            acute: current_acute,
            rehab_ltc: current_rehab,
        },
        &CareBeds {
            acute: acute_after,
            rehab_ltc: rehab_after,
        },
        &agg,
        costs,
    );
    let total_admissions = admissions.total();
    Ok(ScenarioOutcome {
        name: spec.name.clone(),
        initial_demand: initial,
        demand: agg,
        acute_beds: beds,
        rehab_ltc_beds: rehab_after,
        current_acute_beds: current_acute,
        current_rehab_ltc_beds: current_rehab,
        rates: RateSet {
            alpha: total_admissions / residents,
            beta,
            density: total_after / residents,
            mean_stay: if agg.ro_admissions == 0.0 {
                0.0
            } else {
                agg.ro_days / agg.ro_admissions
            },
        },
        over_capacity: beta > 1.0,
        alpha_per_thousand: total_admissions * 1000.0 / residents,
        acute_density: acute_after * 1000.0 / residents,
        rehab_ltc_density: rehab_after * 1000.0 / residents,
        total_density: total_after * 1000.0 / residents,
        acute_share: if total_after > 0.0 {
            acute_after / total_after
        } else {
            0.0
        },
        bed_delta: BedDelta {
            acute: acute_after - current_acute,
            rehab_ltc: rehab_after - current_rehab,
            total: (acute_after - current_acute) + (rehab_after - current_rehab),
        },
        compliance,
        pnl,
        trajectory,
    })
}
