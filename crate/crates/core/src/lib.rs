//! Capacity planning engine for regional hospital networks.
//!
//! The engine takes per-DRG admission tables, a bed inventory and the resident
//! population, splits the demand by appropriateness class and admission
//! regime, applies reallocation scenarios, and solves the resulting bed and
//! utilization equilibrium. Outcomes are checked against the statutory
//! density, rate and share limits and priced with a per-bed cost model.
//!
//! Module map:
//! - [`model`]: value types shared by everything else, plus dataset validation
//! - [`ingest`]: parsers and serializers for the interchange files
//! - [`equilibrium`]: demand / beds / rates conversions
//! - [`constraints`]: the six statutory checks
//! - [`scenario`]: stratification, reallocation steps, scenario runs and sweeps
//! - [`finance`]: P&L of bed deltas and the staffing rule
//! - [`analysis`]: DH stock estimation, mobility, specialty comparison, PI
//! - [`load`]: assembling a validated dataset from file contents

pub mod analysis;
pub mod constraints;
pub mod equilibrium;
pub mod error;
pub mod finance;
pub mod ingest;
pub mod load;
pub mod model;
pub mod scenario;

pub use constraints::{CheckKind, CheckResult, CheckStatus, ComplianceReport, ConstraintThresholds};
pub use equilibrium::{BedRequirement, BetaSolution, DemandAggregate};
pub use error::{DomainError, ParseError, ScenarioError};
pub use finance::{CostModel, Money};
pub use load::{load_dataset, DatasetSources, LoadError, LoadedDataset};
pub use model::{
    BedInventory, BedKey, CareType, DhParameters, DrgKind, DrgRecord, DrgTable, Population,
    Provenance, RateSet, Regime, Sector, TableRegime, Violation,
};
pub use scenario::{
    Dataset, DemandClass, ScenarioOutcome, ScenarioSpec, SolveMode, StepRule, StratifiedDemand,
    SweepResult,
};
