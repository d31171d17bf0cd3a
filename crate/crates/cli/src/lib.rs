//! Batch driver: `bedplan validate` and `bedplan run`.

pub mod args;
pub mod report;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use bedplan_core::analysis::{
    beds_by_group, group_demand, mobility_net, specialty_bed_comparison, Mobility,
};
use bedplan_core::ingest::{parse_grouping, parse_specialty_beds};
use bedplan_core::load::{load_dataset, DatasetSources, LoadError, LoadedDataset};
use bedplan_core::scenario::{parse_scenario_spec, sweep};
use bedplan_core::{ScenarioError, ScenarioSpec};
use thiserror::Error;

use args::{Cli, Command, DataArgs, RunArgs};
use report::{CurrentNetwork, ReportBundle, SpecialtyComparison};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Parse(#[from] LoadError),
    #[error("{} validation problem(s)", .0.len())]
    Invalid(Vec<String>),
    #[error("{path}: {message}")]
    Scenario { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse(_) | CliError::Invalid(_) => 2,
            CliError::Scenario { .. } => 3,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: io::Error::new(io::ErrorKind::InvalidData, e),
    })
}

fn read_opt(path: &Option<PathBuf>) -> Result<Option<String>, CliError> {
    path.as_deref().map(read).transpose()
}

pub fn sources(a: &DataArgs) -> Result<DatasetSources, CliError> {
    Ok(DatasetSources {
        drg_ro: read(&a.drg_ro)?,
        drg_dh: read_opt(&a.drg_dh)?,
        lea45: read(&a.lea45)?,
        lea45plus: read(&a.lea45plus)?,
        beds: read(&a.beds)?,
        population: read(&a.population)?,
        assumption: a.assumption,
        thresholds: read_opt(&a.thresholds)?,
        costs: read_opt(&a.costs)?,
        dh_estimate_beta: a.dh_estimate_beta,
    })
}

/// Load and validate; violations become [`CliError::Invalid`].
pub fn load(a: &DataArgs) -> Result<LoadedDataset, CliError> {
    let loaded = load_dataset(&sources(a)?)?;
    if !loaded.is_clean() {
        return Err(CliError::Invalid(
            loaded.violations.iter().map(ToString::to_string).collect(),
        ));
    }
    Ok(loaded)
}

pub fn load_scenarios(paths: &[PathBuf]) -> Result<Vec<ScenarioSpec>, CliError> {
    let mut specs: Vec<ScenarioSpec> = Vec::with_capacity(paths.len());
    for p in paths {
        let fail = |message: String| CliError::Scenario {
            path: p.clone(),
            message,
        };
        let spec = parse_scenario_spec(read(p)?.as_bytes()).map_err(|e| fail(e.to_string()))?;
        spec.validate().map_err(|e| fail(e.to_string()))?;
        if specs.iter().any(|s| s.name == spec.name) {
            return Err(fail(format!("scenario name {:?} used twice", spec.name)));
        }
        specs.push(spec);
    }
    Ok(specs)
}

fn current_mobility(loaded: &LoadedDataset, served: f64) -> Option<Mobility> {
    let pop = &loaded.dataset.population;
    if pop.inflow_admissions == 0 && pop.outflow_admissions == 0 {
        return None;
    }
    let served = served.round() as i64;
    let resident = served + pop.outflow_admissions as i64 - pop.inflow_admissions as i64;
    let resident = u64::try_from(resident).ok()?;
    match mobility_net(resident, pop.outflow_admissions, pop.inflow_admissions) {
        Ok(m) => Some(m),
        Err(e) => {
            log::warn!("mobility: {e}");
            None
        }
    }
}

fn specialty(
    args: &RunArgs,
    loaded: &LoadedDataset,
    specs: &[ScenarioSpec],
    outcomes: &[bedplan_core::ScenarioOutcome],
) -> Result<Vec<SpecialtyComparison>, CliError> {
    let (Some(gpath), Some(bpath)) = (&args.grouping, &args.specialty_beds) else {
        return Ok(Vec::new());
    };
    let invalid = |path: &Path, e: bedplan_core::ParseError| {
        CliError::Invalid(vec![format!("{}: {e}", path.display())])
    };
    let grouping = parse_grouping(read(gpath)?.as_bytes()).map_err(|e| invalid(gpath, e))?;
    let by_specialty = parse_specialty_beds(read(bpath)?.as_bytes()).map_err(|e| invalid(bpath, e))?;
    let (current, unmapped_specialties) = beds_by_group(&grouping, &by_specialty);
    let mut unmapped_drgs: Vec<String> = grouping
        .unmapped(&loaded.dataset.ro_table)
        .into_iter()
        .map(String::from)
        .collect();
    if let Some(dh) = &loaded.dataset.dh_table {
        unmapped_drgs.extend(grouping.unmapped(dh).into_iter().map(String::from));
        unmapped_drgs.sort();
        unmapped_drgs.dedup();
    }
    let mut out = Vec::new();
    for o in outcomes {
        let spec = specs.iter().find(|s| s.name == o.name).expect("outcome of a spec");
        let demand = match group_demand(&loaded.dataset, spec, &grouping) {
            Ok(d) => d,
            Err(e) => {
                log::warn!("{}: specialty comparison skipped: {e}", o.name);
                continue;
            }
        };
        let rows = match specialty_bed_comparison(
            &demand,
            o.rates.beta,
            &current,
            &loaded.dataset.params,
            args.flag_threshold,
        ) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("{}: specialty comparison skipped: {e}", o.name);
                continue;
            }
        };
        out.push(SpecialtyComparison {
            scenario: o.name.clone(),
            beta: o.rates.beta,
            rows,
            unmapped_drgs: unmapped_drgs.clone(),
            unmapped_specialties: unmapped_specialties.clone(),
        });
    }
    Ok(out)
}

/// Build the report bundle for a run without touching the output directory.
pub fn build_bundle(args: &RunArgs) -> Result<ReportBundle, CliError> {
    let loaded = load(&args.data)?;
    let specs = load_scenarios(&args.scenarios)?;
    let ds = &loaded.dataset;
    let compliance = ds
        .current_compliance(&loaded.thresholds)
        .map_err(|e| CliError::Invalid(vec![e.to_string()]))?;
    let admissions = ds.current_admissions();
    let result = sweep(ds, &specs, &loaded.thresholds, &loaded.costs).map_err(|e| match e {
        ScenarioError::InvalidSpec(m) => CliError::Scenario {
            path: PathBuf::new(),
            message: m,
        },
        other => CliError::Invalid(vec![other.to_string()]),
    })?;
    for f in &result.failures {
        log::warn!("scenario {} failed: {}", f.name, f.error);
    }
    let specialty = specialty(args, &loaded, &specs, &result.outcomes)?;
    Ok(ReportBundle {
        assumption: args.data.assumption,
        rank_key: args.rank,
        current: CurrentNetwork {
            beds: ds.current_beds(),
            admissions,
            compliance,
            dh_estimate: loaded.dh_estimate,
            mobility: current_mobility(&loaded, admissions.total()),
            warnings: loaded.warnings.clone(),
        },
        scenarios: specs,
        sweep: result,
        specialty,
    })
}

pub fn write_bundle(bundle: &ReportBundle, dir: &Path) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    for (name, contents) in bundle.files() {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
    }
    Ok(())
}

fn validate(a: &DataArgs) -> Result<(), CliError> {
    load(a)?;
    println!("ok");
    Ok(())
}

fn run(a: &RunArgs) -> Result<(), CliError> {
    let bundle = build_bundle(a)?;
    write_bundle(&bundle, &a.out)?;
    println!(
        "{} scenario(s) evaluated, {} failed; report in {}",
        bundle.sweep.outcomes.len(),
        bundle.sweep.failures.len(),
        a.out.display()
    );
    Ok(())
}

/// Run a parsed command line and return the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Validate(a) => validate(a),
        Command::Run(a) => run(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            if let CliError::Invalid(list) = &e {
                for v in list {
                    println!("{v}");
                }
            }
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
