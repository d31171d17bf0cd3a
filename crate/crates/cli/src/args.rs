use std::path::PathBuf;

use bedplan_core::ingest::PrivateBedAssumption;
use bedplan_core::load::DEFAULT_DH_ESTIMATE_BETA;
use bedplan_core::scenario::RankKey;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bedplan", version, about = "Hospital network capacity planning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load the inputs and list every validation problem.
    Validate(DataArgs),
    /// Evaluate scenarios and write a report bundle.
    Run(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Bed inventory (sector;regime;care;count).
    #[arg(long)]
    pub beds: PathBuf,
    /// Per-DRG table of acute ordinary admissions.
    #[arg(long = "drg-ro")]
    pub drg_ro: PathBuf,
    /// Per-DRG table of acute day-hospital admissions.
    #[arg(long = "drg-dh")]
    pub drg_dh: Option<PathBuf>,
    #[arg(long)]
    pub lea45: PathBuf,
    #[arg(long)]
    pub lea45plus: PathBuf,
    #[arg(long)]
    pub population: PathBuf,
    /// A: private totals include DH beds. B: private totals are RO only.
    #[arg(long)]
    pub assumption: PrivateBedAssumption,
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    #[arg(long)]
    pub costs: Option<PathBuf>,
    /// Utilization used to infer the DH stock under assumption A.
    #[arg(long = "dh-estimate-beta", default_value_t = DEFAULT_DH_ESTIMATE_BETA)]
    pub dh_estimate_beta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Scenario file; repeat for a sweep.
    #[arg(long = "scenarios", required = true)]
    pub scenarios: Vec<PathBuf>,
    /// Ranking written to ranking.csv.
    #[arg(long, default_value_t = RankKey::Pnl)]
    pub rank: RankKey,
    #[arg(long)]
    pub out: PathBuf,
    /// DRG and specialty to group map, for the specialty comparison.
    #[arg(long, requires = "specialty_beds")]
    pub grouping: Option<PathBuf>,
    /// Current beds per specialty (specialty;beds).
    #[arg(long = "specialty-beds", requires = "grouping")]
    pub specialty_beds: Option<PathBuf>,
    /// Change at or below which a surgical group is flagged.
    #[arg(long = "flag-threshold", default_value_t = bedplan_core::analysis::DEFAULT_INAPPROPRIATENESS_THRESHOLD, allow_negative_numbers = true)]
    pub flag_threshold: f64,
}
