//! Assembling a [`Dataset`] from the raw interchange files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{estimate_dh_bed_stock, resolve_private_dh, DhStockEstimate};
use crate::constraints::{ConstraintThresholds, NetworkBeds};
use crate::error::ParseError;
use crate::finance::CostModel;
use crate::ingest::{
    parse_bed_inventory, parse_drg_table, parse_lea_lists, parse_toml, PopulationFile,
    PrivateBedAssumption,
};
use crate::model::{validate_dataset, validate_table, DhParameters, TableRegime, Violation};
use crate::scenario::Dataset;

/// Utilization assumed when inferring the DH stock from accesses.
pub const DEFAULT_DH_ESTIMATE_BETA: f64 = 0.8;

fn default_estimate_beta() -> f64 {
    DEFAULT_DH_ESTIMATE_BETA
}

/// File contents making up one dataset. Optional documents fall back to
/// the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSources {
    pub drg_ro: String,
    #[serde(default)]
    pub drg_dh: Option<String>,
    pub lea45: String,
    pub lea45plus: String,
    pub beds: String,
    pub population: String,
    pub assumption: PrivateBedAssumption,
    #[serde(default)]
    pub thresholds: Option<String>,
    #[serde(default)]
    pub costs: Option<String>,
    #[serde(default = "default_estimate_beta")]
    pub dh_estimate_beta: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{file}: {source}")]
pub struct LoadError {
    pub file: &'static str,
    #[source]
    pub source: ParseError,
}

fn at(file: &'static str) -> impl Fn(ParseError) -> LoadError {
    move |source| LoadError { file, source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub thresholds: ConstraintThresholds,
    pub costs: CostModel,
    /// Present when the private DH beds were estimated.
    pub dh_estimate: Option<DhStockEstimate>,
    /// Empty when the dataset is clean.
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl LoadedDataset {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Parse every document, estimate pending private DH beds and validate.
///
/// Syntax errors abort; semantic problems are collected in
/// [`LoadedDataset::violations`].
pub fn load_dataset(src: &DatasetSources) -> Result<LoadedDataset, LoadError> {
    let ro_table = parse_drg_table(src.drg_ro.as_bytes(), TableRegime::AcuteRo).map_err(at("drg-ro"))?;
    let dh_table = src
        .drg_dh
        .as_deref()
        .map(|t| parse_drg_table(t.as_bytes(), TableRegime::AcuteDh))
        .transpose()
        .map_err(at("drg-dh"))?;
    let classifier =
        parse_lea_lists(src.lea45.as_bytes(), src.lea45plus.as_bytes()).map_err(at("lea"))?;
    let mut beds = parse_bed_inventory(src.beds.as_bytes(), src.assumption).map_err(at("beds"))?;
    let pop: PopulationFile = parse_toml(src.population.as_bytes()).map_err(at("population"))?;
    let thresholds: ConstraintThresholds = match &src.thresholds {
        Some(t) => parse_toml(t.as_bytes()).map_err(at("thresholds"))?,
        None => ConstraintThresholds::default(),
    };
    let costs: CostModel = match &src.costs {
        Some(t) => parse_toml(t.as_bytes()).map_err(at("costs"))?,
        None => CostModel::default(),
    };

    let mut violations = validate_dataset(&ro_table, &beds, &pop.population);
    if let Some(dh) = &dh_table {
        let mut dh_v = Vec::new();
        validate_table(dh, &mut dh_v);
        violations.extend(dh_v.into_iter().map(|v| Violation {
            locator: format!("dh {}", v.locator),
            ..v
        }));
    }
    if let Err(e) = thresholds.validate() {
        violations.push(Violation {
            locator: "thresholds".into(),
            message: e.to_string(),
        });
    }
    if let Err(e) = costs.validate() {
        violations.push(Violation {
            locator: "costs".into(),
            message: e.to_string(),
        });
    }

    let mut warnings = classifier.cardinality_warnings();
    let mut dh_estimate = None;
    if src.assumption == PrivateBedAssumption::A {
        match &dh_table {
            Some(dh) => {
                let stock = DhParameters::default().with_correction(DhParameters::STOCK_CORRECTION);
                let public_dh = NetworkBeds::from_inventory(&beds).acute_dh;
                match estimate_dh_bed_stock(dh.total_days() as f64, public_dh, src.dh_estimate_beta, &stock) {
                    Ok(est) => {
                        if est.clamped {
                            warnings.push(format!(
                                "estimated DH stock {:.1} is below the public DH stock {public_dh}; private DH beds set to 0",
                                est.total_dh_beds
                            ));
                        }
                        beds = resolve_private_dh(&beds, est.private_dh_beds);
                        dh_estimate = Some(est);
                    }
                    Err(e) => violations.push(Violation {
                        locator: "dh-estimate-beta".into(),
                        message: e.to_string(),
                    }),
                }
            }
            None => violations.push(Violation {
                locator: "beds".into(),
                message: "assumption A needs the DH table to estimate private DH beds".into(),
            }),
        }
    }

    Ok(LoadedDataset {
        dataset: Dataset {
            ro_table,
            dh_table,
            classifier,
            beds,
            population: pop.population,
            non_acute: pop.non_acute,
            params: DhParameters::default(),
        },
        thresholds,
        costs,
        dh_estimate,
        violations,
        warnings,
    })
}
