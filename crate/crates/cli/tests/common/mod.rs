#![allow(dead_code)]

pub mod oracle;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bedplan_core::load::{load_dataset, DatasetSources, LoadedDataset};
use bedplan_core::ingest::PrivateBedAssumption;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures().join(name)
}

pub fn data_args() -> Vec<String> {
    let f = |n: &str| fixture(n).display().to_string();
    vec![
        "--beds".into(),
        f("beds.csv"),
        "--drg-ro".into(),
        f("drg_ro.csv"),
        "--drg-dh".into(),
        f("drg_dh.csv"),
        "--lea45".into(),
        f("lea45.txt"),
        "--lea45plus".into(),
        f("lea45plus.txt"),
        "--population".into(),
        f("population.toml"),
        "--assumption".into(),
        "A".into(),
        "--thresholds".into(),
        f("thresholds.toml"),
        "--costs".into(),
        f("costs.toml"),
    ]
}

pub fn bedplan(args: &[String]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bedplan"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

pub fn scenario_args(names: &[&str]) -> Vec<String> {
    names
        .iter()
        .flat_map(|n| ["--scenarios".to_string(), fixture(&format!("scenarios/{n}")).display().to_string()])
        .collect()
}

pub fn fixture_sources() -> DatasetSources {
    let r = |n: &str| std::fs::read_to_string(fixture(n)).unwrap();
    DatasetSources {
        drg_ro: r("drg_ro.csv"),
        drg_dh: Some(r("drg_dh.csv")),
        lea45: r("lea45.txt"),
        lea45plus: r("lea45plus.txt"),
        beds: r("beds.csv"),
        population: r("population.toml"),
        assumption: PrivateBedAssumption::A,
        thresholds: Some(r("thresholds.toml")),
        costs: Some(r("costs.toml")),
        dh_estimate_beta: 0.8,
    }
}

pub fn fixture_dataset() -> LoadedDataset {
    let loaded = load_dataset(&fixture_sources()).unwrap();
    assert!(loaded.is_clean(), "{:?}", loaded.violations);
    loaded
}
