use std::collections::BTreeMap;

use proptest::prelude::*;
use symfv::certify::{
    evaluate, verify_cell, verify_certificate, verify_group_tables, Bindings, CellContext, CellStatus, CertificateSpec,
    CertificateTable, CertifyError, ConstructionExpr, ErrataReport, Kind, PairExpr, ParamExpr, Role, Slot, TableSet,
    TABLE_KEYS,
};
use symfv::group::{standard_group, GroupSpec};
use symfv::hull::FVector;
use symfv::ops::OpTag;

fn expr(s: &str) -> ConstructionExpr {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn eval_f(s: &str, spec: GroupSpec, star: Option<&str>) -> FVector {
    let g = standard_group(spec).unwrap();
    let mut ctx = CellContext::new(spec);
    if let Some(star) = star {
        ctx = ctx.with_star(expr(star));
    }
    evaluate(&expr(s), &g, &ctx).unwrap_or_else(|e| panic!("{s}: {e}")).f_vector()
}

fn param_strategy() -> impl Strategy<Value = ParamExpr> {
    (-3i64..=3, -3i64..=3, -20i64..=20).prop_map(|(n, d, c)| ParamExpr { n, d, c })
}

fn expr_strategy() -> impl Strategy<Value = ConstructionExpr> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["Tet", "Cub", "Oc", "SnCub", "Ico"])
            .prop_map(|n| ConstructionExpr::Catalog { name: n.to_string(), params: vec![] }),
        (prop::sample::select(vec!["Pyr", "Pri", "TPri", "DPri"]), param_strategy())
            .prop_map(|(n, p)| ConstructionExpr::Catalog { name: n.to_string(), params: vec![p] }),
        (param_strategy(), param_strategy())
            .prop_map(|(a, b)| ConstructionExpr::Catalog { name: "EB".to_string(), params: vec![a, b] }),
        Just(ConstructionExpr::Star),
        Just(ConstructionExpr::Empty),
    ];
    leaf.prop_recursive(4, 16, 1, |inner| {
        prop_oneof![
            (prop::sample::select(OpTag::ALL.to_vec()), param_strategy(), param_strategy(), 1u32..4, inner.clone())
                .prop_map(|(tag, k, m, power, arg)| ConstructionExpr::Op { tag, k, m, power, arg: Box::new(arg) }),
            inner.prop_map(|e| ConstructionExpr::Dual(Box::new(e))),
        ]
    })
}

proptest! {
    #[test]
    fn param_expr_round_trips(p in param_strategy()) {
        let text = p.to_string();
        prop_assert_eq!(text.parse::<ParamExpr>().unwrap(), p);
    }

    #[test]
    fn construction_expr_round_trips(e in expr_strategy()) {
        let text = e.to_string();
        let back: ConstructionExpr = text.parse().unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn param_expr_evaluates_affinely(p in param_strategy(), n in 1i64..100, d in 0i64..50) {
        prop_assert_eq!(p.eval(Bindings { n, d }), p.n * n + p.d * d + p.c);
    }
}

#[test]
fn parses_textual_forms() {
    let e = expr("RP(3,8)^2(TrCub)");
    match &e {
        ConstructionExpr::Op { tag, power, arg, .. } => {
            assert_eq!(*tag, OpTag::RP);
            assert_eq!(*power, 2);
            assert_eq!(**arg, expr("TrCub"));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(expr("CS(3,n)∘CC(3,n)(Pyr[n])"), expr("CS(3,n)(CC(3,n)(Pyr[n]))"));
    assert_eq!(expr("TP(n,1)(*)").to_string(), "TP(n,1)(*)");
    assert_eq!(expr("dual(CS(3,8)(SnCub))").to_string(), "dual(CS(3,8)(SnCub))");
    assert_eq!(expr("Pyr[2n+d+2]").to_string(), "Pyr[2n+d+2]");
    assert_eq!(expr("∅"), ConstructionExpr::Empty);
    for bad in ["", "CS(3)(Tet)", "Pyr[n", "XX(1,2)(Tet)", "dual(Tet", "Tet)"] {
        assert!(bad.parse::<ConstructionExpr>().is_err(), "{bad:?} should not parse");
    }
}

#[test]
fn instantiation_resolves_parameters() {
    let b = Bindings::for_spec(GroupSpec::d(5));
    assert_eq!(b, Bindings { n: 10, d: 5 });
    assert_eq!(expr("CS(2d,2)(Pri[d])").instantiate(b), expr("CS(10,2)(Pri[5])"));
    assert_eq!(Bindings::for_spec(GroupSpec::o()), Bindings { n: 24, d: 0 });
}

#[test]
fn evaluation_examples() {
    assert_eq!(eval_f("Pyr[n]", GroupSpec::c(7), None), FVector::new(8, 8));
    assert_eq!(eval_f("RP(3,4)^3(*)", GroupSpec::t(), Some("Tet")), FVector::new(40, 40));
    assert_eq!(eval_f("dual(CS(3,8)(SnCub))", GroupSpec::o(), None), FVector::new(54, 32));
    assert_eq!(eval_f("CC(3,n)(CS(3,n)(Pyr[3]))", GroupSpec::c(3), None), FVector::new(13, 13));
}

#[test]
fn unbound_star_and_empty_are_errors() {
    let g = standard_group(GroupSpec::t()).unwrap();
    let ctx = CellContext::new(GroupSpec::t());
    assert!(evaluate(&expr("RP(3,4)(*)"), &g, &ctx).is_err());
    assert!(evaluate(&ConstructionExpr::Empty, &g, &ctx).is_err());
}

fn cert(kind: Kind, entries: &[(Role, &str)]) -> CertificateSpec {
    CertificateSpec {
        class: "(0,2)".parse::<PairExpr>().unwrap(),
        slot: Slot::V1,
        kind,
        root: "(12,14)".parse::<PairExpr>().unwrap(),
        entries: entries.iter().map(|(r, e)| (*r, expr(e))).collect::<BTreeMap<_, _>>(),
    }
}

#[test]
fn validation_rejects_malformed_certificates() {
    let ok = cert(Kind::RL, &[(Role::PR, "Tet"), (Role::PL, "TP(3,4)(*)")]);
    assert!(ok.validate().is_ok());
    let missing = cert(Kind::RL, &[(Role::PR, "Tet")]);
    assert!(matches!(missing.validate(), Err(CertifyError::Invalid { .. })));
    let circular = cert(Kind::LR, &[(Role::PL, "CS(3,4)(*)"), (Role::PR, "TP(3,4)(*)")]);
    assert!(circular.validate().is_err());
    let empty_outside_p = cert(Kind::RL, &[(Role::PR, "∅"), (Role::PL, "Tet")]);
    assert!(empty_outside_p.validate().is_err());
    let star_in_base = cert(Kind::B, &[(Role::PB, "*")]);
    assert!(star_in_base.validate().is_err());
    let tri = cert(Kind::Tri, &[(Role::P, "∅"), (Role::PL, "Tet"), (Role::PR, "Tet"), (Role::Q, "RP(3,4)(*)")]);
    assert!(tri.validate().is_err(), "'*' bound to ∅ must be rejected");
}

#[test]
fn builtin_tables_round_trip_through_json() {
    let set = TableSet::builtin();
    for key in TABLE_KEYS {
        let t = set.get(key).unwrap_or_else(|| panic!("missing table {key}"));
        let back = CertificateTable::from_json(&t.to_json()).unwrap();
        assert_eq!(&back, t, "{key}");
        for cell in &t.cells {
            cell.cert.validate().unwrap();
        }
    }
}

#[test]
fn table_dir_overrides_and_falls_back() {
    let dir = std::env::temp_dir().join(format!("symfv-tables-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut t = TableSet::builtin().get("T").unwrap().clone();
    t.description = "edited copy".to_string();
    t.cells.truncate(3);
    std::fs::write(dir.join("T.json"), t.to_json()).unwrap();
    let set = TableSet::from_dir(&dir).unwrap();
    assert_eq!(set.get("T").unwrap().cells.len(), 3);
    assert_eq!(set.get("O").unwrap(), TableSet::builtin().get("O").unwrap());
    std::fs::write(dir.join("O.json"), "{ not json").unwrap();
    assert!(TableSet::from_dir(&dir).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn tetrahedral_cell_verifies_as_printed() {
    let set = TableSet::builtin();
    let t = set.get("T").unwrap();
    let cell = t
        .cells
        .iter()
        .find(|c| c.cert.class.to_string() == "(6,8)" && c.cert.slot == Slot::V1)
        .expect("T (6,8) v1");
    let r = verify_cell(cell, "T", GroupSpec::t()).unwrap();
    assert_eq!(r.status, CellStatus::Pass, "{r:?}");
    let check = verify_certificate(&cell.cert, GroupSpec::t()).unwrap();
    assert!(check.pass);
    assert_eq!(Some(check.root), check.expected_root);
}

#[test]
fn broken_cell_is_reported() {
    let set = TableSet::builtin();
    let mut cell = set.get("T").unwrap().cells[0].clone();
    let role = *cell.cert.entries.keys().next().unwrap();
    cell.cert.entries.insert(role, expr("Ico"));
    cell.alternates.clear();
    let r = verify_cell(&cell, "T", GroupSpec::t()).unwrap();
    assert_eq!(r.status, CellStatus::Fail);
}

#[test]
fn empty_placeholder_is_skipped() {
    let set = TableSet::builtin();
    let t = set.get("D2").unwrap();
    let cell = t
        .cells
        .iter()
        .find(|c| c.cert.entries.get(&Role::P) == Some(&ConstructionExpr::Empty))
        .expect("a D_2 cell with an empty P slot");
    let check = verify_certificate(&cell.cert, GroupSpec::d(2)).unwrap();
    let p = check.entries.iter().find(|e| e.role == Role::P).unwrap();
    assert!(p.skipped && p.pass);
    assert!(check.pass);
}

#[test]
fn fixed_tables_verify() {
    let set = TableSet::builtin();
    let mut reports = Vec::new();
    for spec in [GroupSpec::c(2), GroupSpec::d(2), GroupSpec::t(), GroupSpec::g(1), GroupSpec::g(2)] {
        let r = verify_group_tables(spec, &set).unwrap();
        assert!(r.all_verified(), "{spec}: {r:?}");
        reports.push(r);
    }
    let errata = ErrataReport::from_reports(&reports);
    assert!(!errata.has_failures());
    // Every erratum names a cell that verified only under a recorded reading.
    for e in &errata.entries {
        assert_eq!(e.status, CellStatus::PassWithReading);
        assert!(e.reading.is_some());
        assert!(!e.printed_failures.is_empty() || e.root_mismatch.is_some());
    }
    let back: ErrataReport = serde_json::from_str(&errata.to_json()).unwrap();
    assert_eq!(back, errata);
}
