//! Restructuring scenarios.
//!
//! Demand is stratified by appropriateness class and admission bucket, then
//! up to seven reallocation steps move admissions (or, for step 7, days) out
//! of their source bucket towards DH, ambulatory services, admission
//! avoidance, RSA or rehabilitation. Each step owns a distinct source
//! bucket, so step order never changes the result.

mod run;
mod spec;
mod steps;
mod stratify;
mod sweep;

pub use run::{run_scenario, BedDelta, Dataset, ScenarioOutcome, TrajectoryPoint};
pub use spec::{parse_scenario_spec, write_scenario_spec, ScenarioSpec, SolveMode};
pub use steps::{
    apply_step, apply_steps, base_rule, base_rules, step_source, Fractions, SourcePool, StepRule,
    STEP_COUNT,
};
pub use stratify::{stratify, Bucket, Cell, ClassDemand, DemandClass, StratifiedDemand};
pub use sweep::{rank, sweep, RankKey, Rankings, ScenarioFailure, SweepResult};
