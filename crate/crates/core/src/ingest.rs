//! Readers and writers for the interchange files.
//!
//! DRG tables and bed inventories are semicolon-separated text. Numbers may
//! use either Italian (`1.234,5`) or plain (`1234.5`) notation; everything is
//! normalized to plain `f64`/integers at this boundary. Population, threshold,
//! cost and scenario files are TOML.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::model::{
    BedInventory, BedKey, CareType, DrgKind, DrgRecord, DrgTable, NonAcuteActivity, Population,
    Provenance, Regime, Sector, TableRegime,
};
use crate::scenario::DemandClass;

pub const DRG_COLUMNS: [&str; 13] = [
    "code",
    "M/C",
    "admissions",
    "days",
    "mean_days",
    "mean_days_below_threshold",
    "threshold",
    "one_day_admissions",
    "pct_1d",
    "pct_2_3d",
    "pct_4d_to_threshold",
    "pct_above_threshold",
    "days_above_threshold",
];

/// Published list sizes; other sizes load with a warning.
pub const LEA45_EXPECTED_LEN: usize = 43;
pub const LEA45PLUS_EXPECTED_LEN: usize = 65;

fn decode(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| ParseError::Document(format!("not UTF-8: {e}")))
}

/// Lines with their 1-based numbers, skipping blanks and `#` comments.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Canonical DRG code: numeric codes are zero-padded to three digits.
pub fn normalize_code(raw: &str) -> String {
    let t = raw.trim();
    if !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()) {
        if let Ok(n) = t.parse::<u32>() {
            return format!("{n:03}");
        }
    }
    t.to_string()
}

fn is_thousands_grouped(s: &str) -> bool {
    let mut parts = s.split('.');
    let head = parts.next().unwrap_or("");
    let head = head.strip_prefix('-').unwrap_or(head);
    if head.is_empty() || head.len() > 3 || !head.bytes().all(|b| b.is_ascii_digit()) {
        return false;
    }
    let mut any = false;
    for p in parts {
        any = true;
        if p.len() != 3 || !p.bytes().all(|b| b.is_ascii_digit()) {
            return false;
        }
    }
    any
}

/// Parse a real number in either notation. A comma marks the decimal
/// separator, in which case dots are thousands separators.
pub fn parse_real(field: &str) -> Option<f64> {
    let t = field.trim().trim_end_matches('%').trim();
    if t.is_empty() {
        return None;
    }
    let normalized = if t.contains(',') {
        t.replace('.', "").replace(',', ".")
    } else {
        t.to_string()
    };
    normalized.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parse a count. Dots between three-digit groups are thousands separators
/// (`4.076.546`); a decimal part is rejected.
pub fn parse_count(field: &str) -> Option<i64> {
    let t = field.trim();
    if t.is_empty() {
        return None;
    }
    let digits = if is_thousands_grouped(t) {
        t.replace('.', "")
    } else {
        t.to_string()
    };
    digits.parse::<i64>().ok()
}

fn count_field(line: usize, name: &str, field: &str) -> Result<u64, ParseError> {
    match parse_count(field) {
        Some(v) if v >= 0 => Ok(v as u64),
        Some(v) => Err(ParseError::line(line, format!("{name} is negative ({v})"))),
        None => Err(ParseError::line(
            line,
            format!("{name}: expected a whole number, got {field:?}"),
        )),
    }
}

fn real_field(line: usize, name: &str, field: &str) -> Result<f64, ParseError> {
    parse_real(field)
        .ok_or_else(|| ParseError::line(line, format!("{name}: expected a number, got {field:?}")))
}

fn looks_like_header(fields: &[&str]) -> bool {
    fields.len() > 2 && parse_count(fields[2]).is_none()
}

/// Parse a per-DRG table in the 13-column layout of [`DRG_COLUMNS`].
///
/// A leading `# year: <label>` comment sets the table year.
pub fn parse_drg_table(bytes: &[u8], regime: TableRegime) -> Result<DrgTable, ParseError> {
    let text = decode(bytes)?;
    let year = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .find_map(|l| l.trim().strip_prefix("year:").map(|y| y.trim().to_string()))
        .unwrap_or_default();
    let mut table = DrgTable::new(year, regime);
    let mut seen = BTreeSet::new();
    for (idx, (line, raw)) in content_lines(text).enumerate() {
        let fields: Vec<&str> = raw.split(';').map(str::trim).collect();
        if idx == 0 && looks_like_header(&fields) {
            continue;
        }
        if fields.len() != DRG_COLUMNS.len() {
            return Err(ParseError::line(
                line,
                format!(
                    "expected {} columns, found {}",
                    DRG_COLUMNS.len(),
                    fields.len()
                ),
            ));
        }
        let code = normalize_code(fields[0]);
        if code.is_empty() {
            return Err(ParseError::line(line, "empty DRG code"));
        }
        let kind = match fields[1].to_ascii_uppercase().as_str() {
            "M" => DrgKind::Medical,
            "C" | "S" => DrgKind::Surgical,
            other => {
                return Err(ParseError::line(
                    line,
                    format!("M/C flag must be M or C, got {other:?}"),
                ))
            }
        };
        let threshold = count_field(line, "threshold", fields[6])?;
        let record = DrgRecord {
            code: code.clone(),
            kind,
            admissions: count_field(line, "admissions", fields[2])?,
            total_days: count_field(line, "days", fields[3])?,
            mean_days: real_field(line, "mean_days", fields[4])?,
            mean_days_below_threshold: real_field(line, "mean_days_below_threshold", fields[5])?,
            threshold_days: u32::try_from(threshold)
                .map_err(|_| ParseError::line(line, "threshold out of range"))?,
            one_day_admissions: count_field(line, "one_day_admissions", fields[7])?,
            pct_one_day: real_field(line, "pct_1d", fields[8])?,
            pct_two_three_days: real_field(line, "pct_2_3d", fields[9])?,
            pct_four_days_to_threshold: real_field(line, "pct_4d_to_threshold", fields[10])?,
            pct_above_threshold: real_field(line, "pct_above_threshold", fields[11])?,
            days_above_threshold: count_field(line, "days_above_threshold", fields[12])?,
        };
        if !seen.insert(code.clone()) {
            return Err(ParseError::DuplicateCode(code));
        }
        table.records.push(record);
    }
    Ok(table)
}

/// Inverse of [`parse_drg_table`]; reals are written in shortest round-trip form.
pub fn write_drg_table(table: &DrgTable) -> String {
    let mut out = String::new();
    if !table.year.is_empty() {
        let _ = writeln!(out, "# year: {}", table.year);
    }
    out.push_str(&DRG_COLUMNS.join(";"));
    out.push('\n');
    for r in &table.records {
        let _ = writeln!(
            out,
            "{};{};{};{};{:?};{:?};{};{};{:?};{:?};{:?};{:?};{}",
            r.code,
            r.kind.flag(),
            r.admissions,
            r.total_days,
            r.mean_days,
            r.mean_days_below_threshold,
            r.threshold_days,
            r.one_day_admissions,
            r.pct_one_day,
            r.pct_two_three_days,
            r.pct_four_days_to_threshold,
            r.pct_above_threshold,
            r.days_above_threshold
        );
    }
    out
}

/// Whether the reported private bed totals include DH beds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrivateBedAssumption {
    /// Private totals are DH+RO; the DH share is estimated downstream.
    A,
    /// Private totals are RO only.
    B,
}

impl std::str::FromStr for PrivateBedAssumption {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(PrivateBedAssumption::A),
            "B" | "b" => Ok(PrivateBedAssumption::B),
            other => Err(format!("assumption must be A or B, got {other:?}")),
        }
    }
}

fn parse_key(line: usize, fields: &[&str]) -> Result<BedKey, ParseError> {
    let sector = match fields[0].to_ascii_lowercase().as_str() {
        "public" => Sector::Public,
        "private" => Sector::Private,
        other => return Err(ParseError::line(line, format!("unknown sector {other:?}"))),
    };
    let regime = match fields[1].to_ascii_uppercase().as_str() {
        "RO" => Regime::Ro,
        "DH" => Regime::Dh,
        other => return Err(ParseError::line(line, format!("unknown regime {other:?}"))),
    };
    let care = match fields[2].to_ascii_lowercase().as_str() {
        "acute" => CareType::Acute,
        "rehab" => CareType::Rehab,
        "ltc" => CareType::Ltc,
        other => return Err(ParseError::line(line, format!("unknown care type {other:?}"))),
    };
    Ok(BedKey::new(sector, regime, care))
}

/// Parse `sector;regime;care;count` rows. Repeated keys are summed.
///
/// Under assumption A the private acute RO row holds the combined DH+RO
/// total: it is marked [`Provenance::EstimatedPending`] together with a
/// zero private acute DH entry, until
/// [`crate::analysis::resolve_private_dh`] supplies the DH estimate.
pub fn parse_bed_inventory(
    bytes: &[u8],
    assumption: PrivateBedAssumption,
) -> Result<BedInventory, ParseError> {
    let text = decode(bytes)?;
    let mut sums: BTreeMap<BedKey, i64> = BTreeMap::new();
    for (idx, (line, raw)) in content_lines(text).enumerate() {
        let fields: Vec<&str> = raw.split(';').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(ParseError::line(
                line,
                format!("expected 4 columns, found {}", fields.len()),
            ));
        }
        if idx == 0 && fields[0].eq_ignore_ascii_case("sector") {
            continue;
        }
        let key = parse_key(line, &fields)?;
        let count = parse_count(fields[3]).ok_or_else(|| {
            ParseError::line(line, format!("count: expected a whole number, got {:?}", fields[3]))
        })?;
        if count < 0 {
            return Err(ParseError::line(line, format!("negative bed count {count}")));
        }
        if assumption == PrivateBedAssumption::A
            && key == BedKey::new(Sector::Private, Regime::Dh, CareType::Acute)
        {
            return Err(ParseError::line(
                line,
                "private acute DH beds are estimated under assumption A and must not be listed",
            ));
        }
        *sums.entry(key).or_default() += count;
    }
    let mut inv = BedInventory::new();
    for (key, count) in sums {
        inv.set(key, count, Provenance::Reported);
    }
    if assumption == PrivateBedAssumption::A {
        let ro = BedKey::new(Sector::Private, Regime::Ro, CareType::Acute);
        let dh = BedKey::new(Sector::Private, Regime::Dh, CareType::Acute);
        inv.set(ro, inv.get(ro), Provenance::EstimatedPending);
        inv.set(dh, 0, Provenance::EstimatedPending);
    }
    Ok(inv)
}

pub fn write_bed_inventory(inv: &BedInventory) -> String {
    let mut out = String::from("sector;regime;care;count\n");
    for (key, count, _) in inv.iter() {
        let _ = writeln!(out, "{key};{count}");
    }
    out
}

/// Assigns DRG codes to appropriateness classes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LeaClassifier {
    pub lea45: BTreeSet<String>,
    pub lea45plus: BTreeSet<String>,
}

impl LeaClassifier {
    pub fn new(
        lea45: impl IntoIterator<Item = String>,
        lea45plus: impl IntoIterator<Item = String>,
    ) -> Result<Self, ParseError> {
        let lea45: BTreeSet<String> = lea45.into_iter().map(|c| normalize_code(&c)).collect();
        let lea45plus: BTreeSet<String> =
            lea45plus.into_iter().map(|c| normalize_code(&c)).collect();
        if let Some(code) = lea45.intersection(&lea45plus).next() {
            return Err(ParseError::OverlappingLists(code.clone()));
        }
        Ok(LeaClassifier { lea45, lea45plus })
    }

    pub fn classify(&self, code: &str) -> DemandClass {
        if self.lea45.contains(code) {
            DemandClass::Lea45
        } else if self.lea45plus.contains(code) {
            DemandClass::Lea45Plus
        } else {
            DemandClass::Other
        }
    }

    /// Messages for lists whose size differs from the published ones.
    pub fn cardinality_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.lea45.is_empty() && self.lea45.len() != LEA45_EXPECTED_LEN {
            w.push(format!(
                "LEA45 list has {} codes, the published list has {LEA45_EXPECTED_LEN}",
                self.lea45.len()
            ));
        }
        if !self.lea45plus.is_empty() && self.lea45plus.len() != LEA45PLUS_EXPECTED_LEN {
            w.push(format!(
                "LEA45+ list has {} codes, the published list has {LEA45PLUS_EXPECTED_LEN}",
                self.lea45plus.len()
            ));
        }
        w
    }
}

fn parse_code_list(bytes: &[u8]) -> Result<Vec<String>, ParseError> {
    let text = decode(bytes)?;
    let mut codes = Vec::new();
    for (line, raw) in content_lines(text) {
        let code = raw.split('#').next().unwrap_or("").trim();
        if code.contains(|c: char| c.is_whitespace() || c == ';') {
            return Err(ParseError::line(line, format!("expected one code per line, got {raw:?}")));
        }
        if !code.is_empty() {
            codes.push(code.to_string());
        }
    }
    Ok(codes)
}

pub fn parse_lea_lists(bytes45: &[u8], bytes45plus: &[u8]) -> Result<LeaClassifier, ParseError> {
    let classifier = LeaClassifier::new(parse_code_list(bytes45)?, parse_code_list(bytes45plus)?)?;
    for w in classifier.cardinality_warnings() {
        log::warn!("{w}");
    }
    Ok(classifier)
}

/// Population file: residents, mobility and the non-acute admissions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationFile {
    #[serde(flatten)]
    pub population: Population,
    #[serde(default)]
    pub non_acute: NonAcuteActivity,
}

pub fn parse_toml<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, ParseError> {
    let text = decode(bytes)?;
    toml::from_str(text).map_err(|e| ParseError::Document(e.to_string()))
}

pub fn write_toml<T: Serialize>(value: &T) -> String {
    toml::to_string(value).expect("domain values serialize to TOML")
}

/// `specialty_or_drg;group` lines. Numeric first fields are DRG codes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpecialtyGrouping {
    pub specialty_to_group: BTreeMap<String, String>,
    pub drg_to_group: BTreeMap<String, String>,
}

impl SpecialtyGrouping {
    pub fn groups(&self) -> BTreeSet<&str> {
        self.specialty_to_group
            .values()
            .chain(self.drg_to_group.values())
            .map(String::as_str)
            .collect()
    }

    /// Codes of the table that no group claims.
    pub fn unmapped<'a>(&self, table: &'a DrgTable) -> Vec<&'a str> {
        table
            .records
            .iter()
            .filter(|r| !self.drg_to_group.contains_key(&r.code))
            .map(|r| r.code.as_str())
            .collect()
    }

    /// Groups referenced by DRGs but by no specialty.
    pub fn groups_without_specialty(&self) -> Vec<&str> {
        let with: BTreeSet<&str> = self.specialty_to_group.values().map(String::as_str).collect();
        self.drg_to_group
            .values()
            .map(String::as_str)
            .filter(|g| !with.contains(g))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

pub fn parse_grouping(bytes: &[u8]) -> Result<SpecialtyGrouping, ParseError> {
    let text = decode(bytes)?;
    let mut g = SpecialtyGrouping::default();
    for (line, raw) in content_lines(text) {
        let fields: Vec<&str> = raw.split(';').map(str::trim).collect();
        if fields.len() != 2 || fields[0].is_empty() || fields[1].is_empty() {
            return Err(ParseError::line(line, "expected specialty_or_drg;group"));
        }
        let key = fields[0];
        let map = if key.bytes().all(|b| b.is_ascii_digit()) {
            &mut g.drg_to_group
        } else {
            &mut g.specialty_to_group
        };
        if map.insert(normalize_code(key), fields[1].to_string()).is_some() {
            return Err(ParseError::line(line, format!("{key} assigned twice")));
        }
    }
    Ok(g)
}

/// `specialty;beds` lines with current beds per specialty. An optional
/// header row is skipped.
pub fn parse_specialty_beds(bytes: &[u8]) -> Result<BTreeMap<String, u64>, ParseError> {
    let text = decode(bytes)?;
    let mut out = BTreeMap::new();
    for (idx, (line, raw)) in content_lines(text).enumerate() {
        let fields: Vec<&str> = raw.split(';').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(ParseError::line(line, "expected specialty;beds"));
        }
        if idx == 0 && fields[1].eq_ignore_ascii_case("beds") {
            continue;
        }
        let beds = count_field(line, "beds", fields[1])?;
        *out.entry(fields[0].to_string()).or_default() += beds;
    }
    Ok(out)
}
