//! Brute-force reference for the reallocation steps: every admission is
//! walked one at a time with unit mass and split by its step's fractions.

use std::collections::{BTreeMap, BTreeSet};

use bedplan_core::model::DrgTable;
use bedplan_core::scenario::Fractions;
use bedplan_core::DemandAggregate;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Lea45,
    Lea45Plus,
    Other,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Origin {
    Ro,
    Dh,
}

pub struct Lists<'a> {
    pub lea45: &'a BTreeSet<String>,
    pub lea45plus: &'a BTreeSet<String>,
}

impl Lists<'_> {
    fn class(&self, code: &str) -> Class {
        if self.lea45.contains(code) {
            Class::Lea45
        } else if self.lea45plus.contains(code) {
            Class::Lea45Plus
        } else {
            Class::Other
        }
    }
}

fn dh_step(c: Class) -> Option<u8> {
    (c == Class::Lea45).then_some(1)
}

fn one_day_step(c: Class) -> u8 {
    match c {
        Class::Lea45 => 2,
        Class::Lea45Plus => 4,
        Class::Other => 6,
    }
}

fn multi_day_step(c: Class) -> Option<u8> {
    match c {
        Class::Lea45 => Some(3),
        Class::Lea45Plus => Some(5),
        Class::Other => None,
    }
}

/// One admission with `volume` days (RO) or accesses (DH).
fn walk(t: &mut DemandAggregate, origin: Origin, volume: f64, f: Option<&Fractions>, acc: f64) {
    let stay = f.map_or(1.0, |f| f.stay);
    match origin {
        Origin::Ro => {
            t.ro_admissions += stay;
            t.ro_days += stay * volume;
        }
        Origin::Dh => {
            t.dh_admissions += stay;
            t.dh_accesses += stay * volume;
        }
    }
    if let Some(f) = f {
        t.dh_admissions += f.to_dh;
        t.dh_accesses += f.to_dh * acc;
        t.ambul_services += f.to_ambul;
        t.avoided_admissions += f.to_amau_avoided;
    }
}

/// Post-scenario demand, or `None` when a rule needs DH data the tables
/// do not have.
pub fn enumerate(
    ro: &DrgTable,
    dh: Option<&DrgTable>,
    lists: &Lists,
    rules: &BTreeMap<u8, Fractions>,
    accesses_per_admission: f64,
) -> Option<DemandAggregate> {
    let acc = accesses_per_admission;
    let mut t = DemandAggregate::default();
    let lea45_dh = dh.is_some_and(|d| d.records.iter().any(|r| lists.class(&r.code) == Class::Lea45));
    if rules.contains_key(&1) && !lea45_dh {
        return None;
    }
    for r in &ro.records {
        let class = lists.class(&r.code);
        let f = rules.get(&one_day_step(class));
        for _ in 0..r.one_day_admissions {
            walk(&mut t, Origin::Ro, 1.0, f, acc);
        }
        let multi = r.admissions - r.one_day_admissions;
        if multi == 0 {
            continue;
        }
        let days_each = (r.total_days - r.one_day_admissions) as f64 / multi as f64;
        let above_each = r.days_above_threshold as f64 / multi as f64;
        let f = multi_day_step(class).and_then(|s| rules.get(&s));
        let days_rule = (class == Class::Other).then(|| rules.get(&7)).flatten();
        for _ in 0..multi {
            match days_rule {
                Some(d) => {
                    let to_rsa = above_each * d.to_rsa;
                    let to_rehab = above_each * d.to_rehab;
                    t.ro_admissions += 1.0;
                    t.ro_days += days_each - to_rsa - to_rehab;
                    t.rsa_days += to_rsa;
                    t.rehab_days += to_rehab;
                }
                None => walk(&mut t, Origin::Ro, days_each, f, acc),
            }
        }
    }
    for r in dh.iter().flat_map(|d| d.records.iter()) {
        if r.admissions == 0 {
            continue;
        }
        let class = lists.class(&r.code);
        let f = dh_step(class).and_then(|s| rules.get(&s));
        let accesses_each = r.total_days as f64 / r.admissions as f64;
        for _ in 0..r.admissions {
            walk(&mut t, Origin::Dh, accesses_each, f, acc);
        }
    }
    Some(t)
}
