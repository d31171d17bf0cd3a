use bedplan_core::analysis::{estimate_dh_bed_stock, performance_index, DivisionWorkload};
use bedplan_core::constraints::{evaluate, NetworkBeds, RegimeAdmissions};
use bedplan_core::equilibrium::{required_beds, required_dh_beds, required_ro_beds, solve_beta};
use bedplan_core::finance::{bed_delta_pnl, CareBeds};
use bedplan_core::ingest::{parse_drg_table, write_drg_table};
use bedplan_core::model::{validate_dataset, BedInventory, DrgKind, DrgRecord, DrgTable, TableRegime};
use bedplan_core::scenario::{
    apply_step, base_rule, run_scenario, Cell, Fractions, SolveMode, StepRule,
};
use bedplan_core::{
    CheckStatus, ConstraintThresholds, CostModel, DemandAggregate, DhParameters, Population,
    ScenarioSpec, StratifiedDemand,
};
use proptest::prelude::*;

fn params() -> DhParameters {
    DhParameters::default()
}

fn demand_strategy() -> impl Strategy<Value = DemandAggregate> {
    (0.0..5e6f64, 0.0..2e6f64).prop_map(|(ro_days, dh_accesses)| DemandAggregate {
        ro_days,
        dh_accesses,
        ..Default::default()
    })
}

fn record_strategy() -> impl Strategy<Value = DrgRecord> {
    (1u32..999, any::<bool>(), 0u64..5000, 0u64..40, 1u32..60).prop_flat_map(
        |(code, surgical, adm, mean, thr)| {
            let kind = if surgical { DrgKind::Surgical } else { DrgKind::Medical };
            (0..=adm).prop_map(move |one_day| {
                let days = adm + (adm - one_day) * mean;
                let mut r = DrgRecord::from_counts(
                    format!("{code:03}"),
                    kind,
                    adm,
                    days,
                    one_day,
                    thr,
                    (adm - one_day) * mean / 3,
                );
                r.pct_two_three_days = 1.5;
                r
            })
        },
    )
}

proptest! {
    #[test]
    fn beds_then_beta_round_trip(d in demand_strategy(), beta in 0.01..=1.2f64) {
        let beds = required_ro_beds(d.ro_days, beta, &params()).unwrap()
            + required_dh_beds(d.dh_accesses, beta, &params()).unwrap();
        prop_assume!(beds > 0.0);
        let solved = solve_beta(&d, beds, &params()).unwrap();
        prop_assert!((solved.beta - beta).abs() < 1e-9);
    }

    #[test]
    fn required_beds_homogeneous(d in demand_strategy(), beta in 0.1..=1.2f64, k in 0.1..10.0f64) {
        let base = required_beds(&d, beta, &params()).unwrap().total();
        let scaled = required_beds(&d.scaled(k), beta, &params()).unwrap().total();
        prop_assert!((scaled - k * base).abs() <= 1e-9 * scaled.abs().max(1.0));
    }

    #[test]
    fn required_beds_monotone(d in demand_strategy(), b1 in 0.1..1.0f64, db in 0.01..0.2f64, extra in 1.0..1e4f64) {
        prop_assume!(d.ro_days + d.dh_accesses > 0.0);
        let at = |d: &DemandAggregate, b| required_beds(d, b, &params()).unwrap().total();
        prop_assert!(at(&d, b1 + db) < at(&d, b1));
        let more_ro = DemandAggregate { ro_days: d.ro_days + extra, ..d };
        let more_dh = DemandAggregate { dh_accesses: d.dh_accesses + extra, ..d };
        prop_assert!(at(&more_ro, b1) > at(&d, b1));
        prop_assert!(at(&more_dh, b1) > at(&d, b1));
    }

    #[test]
    fn fundamental_relationship(adm in 1.0..1e6f64, mean_stay in 1.0..30.0f64, residents in 1e4..1e7f64, beta in 0.1..1.2f64) {
        let days = adm * mean_stay;
        let beds = required_ro_beds(days, beta, &params()).unwrap();
        let alpha = adm / residents;
        let density = beds / residents;
        let lhs = mean_stay * alpha;
        let rhs = beta * density * 365.0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-12));
    }

    #[test]
    fn compliance_scale_invariant(
        beds in prop::array::uniform5(0u32..500),
        adm in prop::array::uniform5(0u32..20_000),
        residents in 1u64..200_000,
        k in 1u64..50,
    ) {
        let mk_beds = |m: f64| NetworkBeds {
            acute_ro: beds[0] as f64 * m, acute_dh: beds[1] as f64 * m,
            rehab_ro: beds[2] as f64 * m, rehab_dh: beds[3] as f64 * m,
            ltc: beds[4] as f64 * m, estimated_split: false,
        };
        let mk_adm = |m: f64| RegimeAdmissions {
            acute_ro: adm[0] as f64 * m, acute_dh: adm[1] as f64 * m,
            rehab_ro: adm[2] as f64 * m, rehab_dh: adm[3] as f64 * m, ltc: adm[4] as f64 * m,
        };
        let t = ConstraintThresholds::default();
        let a = evaluate(&mk_beds(1.0), &mk_adm(1.0), &Population::new(residents), &t).unwrap();
        let b = evaluate(&mk_beds(k as f64), &mk_adm(k as f64), &Population::new(residents * k), &t).unwrap();
        for (x, y) in a.checks.iter().zip(&b.checks) {
            prop_assert_eq!(x.status, y.status, "{:?} vs {:?}", x, y);
        }
    }

    #[test]
    fn relaxing_a_cap_never_fails_more(
        beds in prop::array::uniform5(0u32..500),
        adm in prop::array::uniform5(0u32..20_000),
        residents in 1u64..200_000,
        which in 0usize..4,
        bump in 0.0..5.0f64,
    ) {
        let nb = NetworkBeds {
            acute_ro: beds[0] as f64, acute_dh: beds[1] as f64, rehab_ro: beds[2] as f64,
            rehab_dh: beds[3] as f64, ltc: beds[4] as f64, estimated_split: false,
        };
        let ra = RegimeAdmissions {
            acute_ro: adm[0] as f64, acute_dh: adm[1] as f64, rehab_ro: adm[2] as f64,
            rehab_dh: adm[3] as f64, ltc: adm[4] as f64,
        };
        let t = ConstraintThresholds::default();
        let mut relaxed = t;
        match which {
            0 => relaxed.max_total_density += bump,
            1 => relaxed.max_acute_density += bump,
            2 => relaxed.max_rehab_ltc_density += bump,
            _ => relaxed.max_hospitalization_rate += bump * 10.0,
        }
        let pop = Population::new(residents);
        let a = evaluate(&nb, &ra, &pop, &t).unwrap();
        let b = evaluate(&nb, &ra, &pop, &relaxed).unwrap();
        for (x, y) in a.checks.iter().zip(&b.checks) {
            if x.status == CheckStatus::Pass {
                prop_assert_eq!(y.status, CheckStatus::Pass);
            }
        }
    }

    #[test]
    fn drg_table_round_trip(records in prop::collection::vec(record_strategy(), 0..20)) {
        let mut table = DrgTable::new("2008", TableRegime::AcuteRo);
        let mut seen = std::collections::BTreeSet::new();
        for r in records {
            if seen.insert(r.code.clone()) {
                table.records.push(r);
            }
        }
        let text = write_drg_table(&table);
        let back = parse_drg_table(text.as_bytes(), TableRegime::AcuteRo).unwrap();
        prop_assert_eq!(back, table);
    }

    #[test]
    fn validation_is_order_independent(records in prop::collection::vec(record_strategy(), 0..12), seed in any::<u64>()) {
        let mut table = DrgTable::new("2008", TableRegime::AcuteRo);
        table.records = records;
        let pop = Population::new(1000);
        let a = validate_dataset(&table, &BedInventory::new(), &pop);
        let again = validate_dataset(&table, &BedInventory::new(), &pop);
        prop_assert_eq!(&a, &again);
        let n = table.records.len().max(1);
        table.records.rotate_left((seed as usize) % n);
        prop_assert_eq!(a, validate_dataset(&table, &BedInventory::new(), &pop));
    }

    #[test]
    fn pnl_superposition(a1 in -500i32..500, r1 in -200i32..200, a2 in -500i32..500, r2 in -200i32..200, amb in 0u32..100_000, rsa in 0u32..36_500) {
        let c = CostModel::default();
        let base = CareBeds { acute: 10_000.0, rehab_ltc: 2_000.0 };
        let after = |a: i32, r: i32| CareBeds { acute: base.acute - a as f64, rehab_ltc: base.rehab_ltc - r as f64 };
        let none = DemandAggregate::default();
        let services = DemandAggregate { ambul_services: amb as f64, rsa_days: rsa as f64, ..Default::default() };
        let p1 = bed_delta_pnl(&base, &after(a1, r1), &none, &c);
        let p2 = bed_delta_pnl(&base, &after(a2, r2), &services, &c);
        let both = bed_delta_pnl(&base, &after(a1 + a2, r1 + r2), &services, &c);
        prop_assert_eq!(p1 + p2, both);
    }

    #[test]
    fn pi_monotone(emg in 0.0..1e5f64, plan in 0.0..1e5f64, keep in 0.0..=1.0f64, hb in 0.0..500.0f64, extra in 1.0..100.0f64) {
        let w = DivisionWorkload {
            emergency_days: emg,
            planned_days: [("001".to_string(), plan)].into(),
            ro_retention: [("001".to_string(), keep)].into(),
            observed_beds: hb,
        };
        let pi = performance_index(&w, 0.85, &params()).unwrap();
        let more_beds = DivisionWorkload { observed_beds: hb + extra, ..w.clone() };
        prop_assert!(performance_index(&more_beds, 0.85, &params()).unwrap() < pi);
        let more_emg = DivisionWorkload { emergency_days: emg + extra, ..w.clone() };
        prop_assert!(performance_index(&more_emg, 0.85, &params()).unwrap() > pi);
        let more_plan = DivisionWorkload { planned_days: [("001".to_string(), plan + extra)].into(), ..w.clone() };
        prop_assert!(performance_index(&more_plan, 0.85, &params()).unwrap() > pi);
    }

    #[test]
    fn pi_without_dh_is_pure_ro(emg in 0.0..1e5f64, plan in 0.0..1e5f64, hb in 0.0..500.0f64, beta in 0.1..1.2f64) {
        let w = DivisionWorkload {
            emergency_days: emg,
            planned_days: [("001".to_string(), plan)].into(),
            ro_retention: [("001".to_string(), 1.0)].into(),
            observed_beds: hb,
        };
        let pi = performance_index(&w, beta, &params()).unwrap();
        let pure = required_ro_beds(emg + plan, beta, &params()).unwrap() - hb;
        prop_assert!((pi - pure).abs() <= 1e-9 * pure.abs().max(1.0));
    }

    #[test]
    fn dh_stock_correction_ratio(acc in 0.0..1e6f64, beta in 0.1..1.2f64) {
        let full = estimate_dh_bed_stock(acc, 0.0, beta, &params()).unwrap().total_dh_beds;
        let corrected = estimate_dh_bed_stock(acc, 0.0, beta, &params().with_correction(0.75)).unwrap().total_dh_beds;
        prop_assert!((corrected - full * 4.0 / 3.0).abs() <= 1e-12 * corrected.max(1.0));
    }

    #[test]
    fn steps_preserve_nonnegativity(
        adm in 0.0..1e4f64, extra_days in 0.0..1e5f64, at_share in 0.0..=1.0f64,
        w in prop::array::uniform4(0.0..1.0f64), id in 1u8..=7,
    ) {
        let mut d = StratifiedDemand::empty();
        for c in bedplan_core::DemandClass::ALL {
            let cd = d.class_mut(c);
            cd.dh = Cell { admissions: adm, days: adm * 2.0 };
            cd.ro_1d_minus = Cell { admissions: adm, days: adm };
            cd.ro_1d_plus = Cell { admissions: adm, days: adm + extra_days };
            cd.days_above_threshold = extra_days * at_share;
            cd.dh_available = true;
        }
        let rule = random_rule(id, w);
        let (next, _) = apply_step(&d, &rule, &params()).unwrap();
        for c in bedplan_core::DemandClass::ALL {
            let cd = next.class(c);
            for cell in [cd.dh, cd.ro_1d_minus, cd.ro_1d_plus] {
                prop_assert!(cell.admissions >= 0.0 && cell.days >= 0.0);
            }
            prop_assert!(cd.days_above_threshold >= 0.0);
        }
        let agg = next.aggregate();
        for v in [agg.ambul_services, agg.rsa_days, agg.rehab_days, agg.avoided_admissions, agg.dh_accesses] {
            prop_assert!(v >= 0.0);
        }
    }
}

/// A valid rule for step `id` built from four weights.
fn random_rule(id: u8, w: [f64; 4]) -> StepRule {
    let total: f64 = w.iter().sum::<f64>().max(1e-9);
    let n = |i: usize| w[i] / total;
    let mut f = Fractions::default();
    match id {
        1 => {
            f.to_ambul = n(0);
            f.to_amau_avoided = n(1);
        }
        7 => {
            f.to_rsa = n(0);
            f.to_rehab = n(1);
        }
        _ => {
            f.to_dh = n(0);
            f.to_ambul = n(1);
            f.to_amau_avoided = n(2);
        }
    }
    f.stay = (1.0 - (f.to_dh + f.to_ambul + f.to_amau_avoided + f.to_rsa + f.to_rehab)).max(0.0);
    StepRule::new(id, f)
}

/// Pushing admissions from `stay` to ambulatory care never lowers the P&L
/// when beds are sized at a fixed utilization.
#[test]
fn more_ambulatory_never_costs_more() {
    let dataset = bedplan_bench_fixture();
    let mut last = None;
    for i in 0..=10 {
        let amb = 0.2 + 0.04 * i as f64;
        let rule = StepRule::new(
            3,
            Fractions {
                to_dh: 0.2,
                to_ambul: amb,
                stay: 0.8 - amb,
                ..Default::default()
            },
        );
        let spec = ScenarioSpec::base("m", SolveMode::FixedBeta { beta: 0.85 })
            .with_steps(vec![2, 3, 4, 5, 6, 7])
            .with_override(rule);
        let out = run_scenario(&dataset, &spec, &Default::default(), &Default::default()).unwrap();
        if let Some(prev) = last {
            assert!(out.pnl >= prev, "{:?} < {:?}", out.pnl, prev);
        }
        last = Some(out.pnl);
    }
    assert!(base_rule(3).is_some());
}

fn bedplan_bench_fixture() -> bedplan_core::Dataset {
    use bedplan_core::ingest::LeaClassifier;
    use bedplan_core::model::{BedKey, CareType, Provenance, Regime, Sector};
    let mut ro = DrgTable::new("t", TableRegime::AcuteRo);
    ro.records.push(DrgRecord::from_counts("001", DrgKind::Surgical, 900, 5400, 100, 10, 400));
    ro.records.push(DrgRecord::from_counts("002", DrgKind::Medical, 600, 4200, 60, 12, 300));
    ro.records.push(DrgRecord::from_counts("003", DrgKind::Medical, 2000, 18000, 300, 15, 2500));
    let mut beds = BedInventory::new();
    beds.set(BedKey::new(Sector::Public, Regime::Ro, CareType::Acute), 80, Provenance::Reported);
    bedplan_core::Dataset {
        ro_table: ro,
        dh_table: None,
        classifier: LeaClassifier::new(vec!["001".into()], vec!["002".into()]).unwrap(),
        beds,
        population: Population::new(25_000),
        non_acute: Default::default(),
        params: params(),
    }
}
