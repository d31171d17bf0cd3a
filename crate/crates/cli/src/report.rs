//! Report bundle assembly and its fixed-precision tables.
//!
//! Every number comes from an engine output; this module only selects,
//! scales to display units and rounds.

use std::fmt::Write as _;

use bedplan_core::analysis::{DhStockEstimate, Mobility, SpecialtyRow};
use bedplan_core::constraints::{NetworkBeds, RegimeAdmissions};
use bedplan_core::ingest::PrivateBedAssumption;
use bedplan_core::scenario::{RankKey, SweepResult};
use bedplan_core::{CheckKind, CheckStatus, ComplianceReport, ScenarioOutcome, ScenarioSpec, SolveMode};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CurrentNetwork {
    pub beds: NetworkBeds,
    pub admissions: RegimeAdmissions,
    pub compliance: ComplianceReport,
    pub dh_estimate: Option<DhStockEstimate>,
    pub mobility: Option<Mobility>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecialtyComparison {
    pub scenario: String,
    pub beta: f64,
    pub rows: Vec<SpecialtyRow>,
    pub unmapped_drgs: Vec<String>,
    pub unmapped_specialties: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle {
    pub assumption: PrivateBedAssumption,
    pub rank_key: RankKey,
    pub current: CurrentNetwork,
    pub scenarios: Vec<ScenarioSpec>,
    pub sweep: SweepResult,
    pub specialty: Vec<SpecialtyComparison>,
}

/// File name and contents, in write order.
pub type BundleFile = (&'static str, String);

/// Fixed-precision decimal without a negative zero.
pub fn fixed(v: f64, decimals: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    let s = format!("{v:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

fn rate(v: f64) -> String {
    fixed(v, 1)
}

fn density(v: f64) -> String {
    fixed(v, 2)
}

fn percent(share: f64) -> String {
    fixed(share * 100.0, 1)
}

fn beds(v: f64) -> String {
    fixed(v, 1)
}

fn solve_label(mode: &SolveMode) -> String {
    match mode {
        SolveMode::FixedBeta { beta } => format!("beta={}", percent(*beta)),
        SolveMode::ObservedBeta => "observed_beta".into(),
        SolveMode::FixedDensity { acute_density } => format!("acute_density={}", density(*acute_density)),
    }
}

/// Checks in display units: densities per 1,000 with 2 decimals, the rate
/// per 1,000 with 1, shares in percent with 1.
fn check_value(kind: CheckKind, v: f64) -> String {
    match kind {
        CheckKind::TotalDensity | CheckKind::AcuteDensity | CheckKind::RehabLtcDensity => density(v),
        CheckKind::HospitalizationRate => rate(v),
        CheckKind::DhAdmissionShare | CheckKind::DhBedShare => percent(v),
    }
}

fn status(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "fail",
        CheckStatus::NotApplicable => "n/a",
    }
}

fn opt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn outcomes_table(specs: &[ScenarioSpec], outcomes: &[ScenarioOutcome]) -> String {
    let mut out = String::from(
        "scenario;steps;solve;alpha_per_1000;beta_pct;acute_density;rehab_ltc_density;total_density;acute_share_pct;acute_ro_beds;acute_dh_beds;rehab_ltc_beds;delta_acute;delta_rehab_ltc;delta_total;pnl_eur;over_capacity;compliant\n",
    );
    for o in outcomes {
        let spec = specs.iter().find(|s| s.name == o.name);
        let steps = spec
            .map(|s| {
                let mut ids = s.steps.clone();
                ids.sort_unstable();
                ids.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
            })
            .unwrap_or_default();
        let solve = spec.map(|s| solve_label(&s.solve)).unwrap_or_default();
        let _ = writeln!(
            out,
            "{};{};{};{};{};{};{};{};{};{};{};{};{};{};{};{};{};{}",
            o.name,
            steps,
            solve,
            rate(o.alpha_per_thousand),
            percent(o.rates.beta),
            density(o.acute_density),
            density(o.rehab_ltc_density),
            density(o.total_density),
            percent(o.acute_share),
            beds(o.acute_beds.ro_beds),
            beds(o.acute_beds.dh_beds),
            beds(o.rehab_ltc_beds),
            beds(o.bed_delta.acute),
            beds(o.bed_delta.rehab_ltc),
            beds(o.bed_delta.total),
            o.pnl,
            o.over_capacity,
            o.compliance.overall_pass,
        );
    }
    out
}

/// One column per criterion, best first.
pub fn rankings_table(sweep: &SweepResult) -> String {
    let mut out = String::from("position;alpha;beta;pnl;acute_share\n");
    let r = &sweep.rankings;
    for i in 0..r.alpha.len() {
        let _ = writeln!(
            out,
            "{};{};{};{};{}",
            i + 1,
            r.alpha[i],
            r.beta[i],
            r.pnl[i],
            r.acute_share[i]
        );
    }
    out
}

fn rank_value(key: RankKey, o: &ScenarioOutcome) -> String {
    match key {
        RankKey::Alpha => rate(o.alpha_per_thousand),
        RankKey::Beta => percent(o.rates.beta),
        RankKey::Pnl => o.pnl.to_string(),
        RankKey::AcuteShare => percent(o.acute_share),
    }
}

pub fn ranking_table(sweep: &SweepResult, key: RankKey) -> String {
    let mut out = format!("position;scenario;{key}\n");
    for (i, name) in sweep.rankings.get(key).iter().enumerate() {
        let value = sweep
            .outcomes
            .iter()
            .find(|o| &o.name == name)
            .map(|o| rank_value(key, o))
            .unwrap_or_default();
        let _ = writeln!(out, "{};{};{}", i + 1, name, value);
    }
    out
}

fn compliance_rows(out: &mut String, scenario: &str, report: &ComplianceReport) {
    for c in &report.checks {
        let f = |v| check_value(c.check, v);
        let _ = writeln!(
            out,
            "{};{};{};{};{};{};{}",
            scenario,
            c.check,
            opt(c.measured, f),
            f(c.threshold),
            opt(c.margin, f),
            status(c.status),
            c.complete
        );
    }
    let _ = writeln!(
        out,
        "{};resident_demand_rate;{};;;;true",
        scenario,
        rate(report.resident_demand_rate)
    );
}

/// The current network first, then each scenario.
pub fn compliance_table(current: &ComplianceReport, outcomes: &[ScenarioOutcome]) -> String {
    let mut out = String::from("scenario;check;measured;threshold;margin;status;complete\n");
    compliance_rows(&mut out, "(current)", current);
    for o in outcomes {
        compliance_rows(&mut out, &o.name, &o.compliance);
    }
    out
}

/// Rates after each step: the plotting series.
pub fn trajectory_table(outcomes: &[ScenarioOutcome]) -> String {
    let mut out = String::from("scenario;after_step;alpha_per_1000;beta_pct;acute_density\n");
    for o in outcomes {
        for p in &o.trajectory {
            let step = p.after_step.map(|s| s.to_string()).unwrap_or_else(|| "0".into());
            let _ = writeln!(
                out,
                "{};{};{};{};{}",
                o.name,
                step,
                rate(p.alpha_per_thousand),
                percent(p.beta),
                density(p.acute_density)
            );
        }
    }
    out
}

pub fn failures_table(sweep: &SweepResult) -> String {
    let mut out = String::from("scenario;error\n");
    for f in &sweep.failures {
        let _ = writeln!(out, "{};{}", f.name, f.error.replace(['\n', ';'], " "));
    }
    out
}

pub fn specialty_table(rows: &[SpecialtyComparison]) -> String {
    let mut out = String::from(
        "scenario;group;required_beds;current_beds;change_pct;surgical;organizational_inappropriateness\n",
    );
    for s in rows {
        for r in &s.rows {
            let _ = writeln!(
                out,
                "{};{};{};{};{};{};{}",
                s.scenario,
                r.group,
                beds(r.required_beds),
                beds(r.current_beds),
                opt(r.pct_change, percent),
                r.surgical,
                r.organizational_inappropriateness
            );
        }
    }
    out
}

impl ReportBundle {
    /// Every file of the bundle.
    pub fn files(&self) -> Vec<BundleFile> {
        let outcomes = &self.sweep.outcomes;
        let mut json = serde_json::to_string_pretty(self).expect("bundle serializes");
        json.push('\n');
        let mut files = vec![
            ("report.json", json),
            ("outcomes.csv", outcomes_table(&self.scenarios, outcomes)),
            ("rankings.csv", rankings_table(&self.sweep)),
            ("ranking.csv", ranking_table(&self.sweep, self.rank_key)),
            ("compliance.csv", compliance_table(&self.current.compliance, outcomes)),
            ("trajectory.csv", trajectory_table(outcomes)),
            ("failures.csv", failures_table(&self.sweep)),
        ];
        if !self.specialty.is_empty() {
            files.push(("specialty.csv", specialty_table(&self.specialty)));
        }
        files
    }
}
