//! Synthetic regional datasets for benchmarking the engine.

use bedplan_core::ingest::LeaClassifier;
use bedplan_core::model::{
    BedInventory, BedKey, CareType, DhParameters, DrgKind, DrgRecord, DrgTable, NonAcuteActivity,
    Population, Provenance, Regime, Sector, TableRegime,
};
use bedplan_core::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A dataset with `drgs` rows, roughly a fifth of them LEA45 and a fifth
/// LEA45+, sized like a region of four million residents.
pub fn synthetic_dataset(drgs: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ro = DrgTable::new("synthetic", TableRegime::AcuteRo);
    let mut dh = DrgTable::new("synthetic", TableRegime::AcuteDh);
    let mut lea45 = Vec::new();
    let mut lea45plus = Vec::new();
    for i in 0..drgs {
        let code = format!("{:03}", i + 1);
        let kind = if rng.random_bool(0.4) {
            DrgKind::Surgical
        } else {
            DrgKind::Medical
        };
        let admissions: u64 = rng.random_range(50..5000);
        let one_day = rng.random_range(0..=admissions / 3);
        let multi = admissions - one_day;
        let multi_days = multi * rng.random_range(2..12);
        let above = rng.random_range(0..=(multi_days - multi) / 4);
        ro.records.push(DrgRecord::from_counts(
            code.clone(),
            kind,
            admissions,
            one_day + multi_days,
            one_day,
            rng.random_range(5..40),
            above,
        ));
        match i % 5 {
            0 => lea45.push(code.clone()),
            1 => lea45plus.push(code.clone()),
            _ => {}
        }
        if i % 5 != 1 {
            let dh_adm = rng.random_range(0..admissions);
            dh.records.push(DrgRecord::from_counts(
                code,
                kind,
                dh_adm,
                dh_adm * 2,
                0,
                1,
                0,
            ));
        }
    }
    let mut beds = BedInventory::new();
    let mut put = |s, r, c, n| beds.set(BedKey::new(s, r, c), n, Provenance::Reported);
    put(Sector::Public, Regime::Ro, CareType::Acute, 9_000);
    put(Sector::Public, Regime::Dh, CareType::Acute, 985);
    put(Sector::Private, Regime::Ro, CareType::Acute, 2_500);
    put(Sector::Public, Regime::Ro, CareType::Rehab, 1_500);
    put(Sector::Private, Regime::Ro, CareType::Ltc, 400);
    Dataset {
        ro_table: ro,
        dh_table: Some(dh),
        classifier: LeaClassifier::new(lea45, lea45plus).expect("disjoint by construction"),
        beds,
        population: Population::new(4_076_546),
        non_acute: NonAcuteActivity {
            rehab_ro_admissions: 20_000.0,
            rehab_dh_admissions: 3_000.0,
            ltc_admissions: 2_000.0,
        },
        params: DhParameters::default(),
    }
}
