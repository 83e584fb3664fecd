use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use symfv_cli::{run, EXIT_FAIL, EXIT_OK, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("symfv").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = call(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\nstdout: {out}\nstderr: {err}"));
    (code, v)
}

fn golden(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

#[test]
fn golden_outputs() {
    let cases: &[(&[&str], &str, i32)] = &[
        (&["classify", "--group", "D:2", "--f", "6,6"], "classify_d2_6_6.json", EXIT_FAIL),
        (&["classify", "--group", "D:5", "--f", "12,17"], "classify_d5_12_17.json", EXIT_FAIL),
        (&["classify", "--group", "C:5", "--f", "10,7"], "classify_c5_10_7.json", EXIT_OK),
        (&["catalog", "--build", "Cub"], "catalog_cub.json", EXIT_OK),
        (&["residues", "--group", "T"], "residues_t.json", EXIT_OK),
        (&["verify-tables", "--group", "G:1"], "verify_g1.json", EXIT_OK),
        (&["synth", "--group", "C:3", "--f", "10,10"], "synth_c3_10_10.json", EXIT_OK),
    ];
    for (args, file, want) in cases {
        let (code, v) = json(args);
        assert_eq!(code, *want, "{args:?}");
        assert_eq!(v, golden(file), "{args:?}");
    }
}

#[test]
fn exclusion_is_reported() {
    let (code, v) = json(&["classify", "--group", "D:2", "--f", "6,6"]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(v["member"], false);
    assert_eq!(v["exclusion"], "(6,6)");
}

#[test]
fn cube_off_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.off");
    let (code, _, _) = call(&["catalog", "--build", "Cub", "--off", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("OFF"));
    let counts: Vec<usize> = lines.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(counts, vec![8, 6, 12]);
    let first = lines.next().unwrap();
    assert!(first.split_whitespace().all(|x| x.split('.').nth(1).map_or(false, |d| d.len() == 12)), "{first}");
}

#[test]
fn digits_flag_controls_precision() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ico.off");
    let (code, _, _) = call(&["catalog", "--build", "Ico", "--off", path.to_str().unwrap(), "--digits", "4"]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&path).unwrap();
    let vertex = text.lines().nth(2).unwrap();
    assert!(vertex.split_whitespace().all(|x| x.split('.').nth(1).map_or(false, |d| d.len() == 4)), "{vertex}");
}

#[test]
fn tetrahedral_tables_verify() {
    let (code, v) = json(&["verify-tables", "--group", "T", "--jobs", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["cells"], 15);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["verified"], true);
    let (code, v) = json(&["verify-tables", "--group", "T", "--report", "json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["tables"][0]["cells"].as_array().unwrap().len(), 15);
}

#[test]
fn synth_writes_off_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let off = dir.path().join("w.off");
    let trace = dir.path().join("w.json");
    let (code, v) = json(&[
        "synth", "--group", "T", "--f", "40,40", "--off", off.to_str().unwrap(), "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["f"], serde_json::json!([40, 40]));
    let t: symfv::synth::Trace = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t.f, symfv::FVector::new(40, 40));
    assert!(std::fs::read_to_string(&off).unwrap().starts_with("OFF\n40 40 78\n"));
}

#[test]
fn synth_refuses_non_members() {
    let (code, v) = json(&["synth", "--group", "G:1", "--f", "4,4"]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(v["member"], false);
    assert_eq!(v["exclusion"], "(4,4)");
}

#[test]
fn pretty_output_is_text() {
    let (code, out, _) = call(&["--pretty", "classify", "--group", "T", "--f", "4,4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("(4,4) in F(T): member"), "{out}");
    let (code, out, _) = call(&["verify-tables", "--group", "O", "--pretty"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().next().unwrap().starts_with("group"));
    let (code, out, _) = call(&["catalog", "--list", "--pretty"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l.starts_with("SnDo")));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["classify", "--group", "Q:3", "--f", "4,4"][..],
        &["classify", "--group", "C:3", "--f", "4"],
        &["classify", "--group", "C:0", "--f", "4,4"],
        &["catalog"],
        &["catalog", "--list", "--build", "Cub"],
        &["catalog", "--build", "Nope"],
        &["verify-tables", "--group", "all", "--max-param", "2"],
        &["verify-tables", "--group", "T", "--jobs", "0"],
        &["frobnicate"],
        &[],
    ] {
        let (code, _, err) = call(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify-tables"));
}

#[test]
fn binary_exit_codes_and_table_override() {
    let bin = env!("CARGO_BIN_EXE_symfv");
    let status = Command::new(bin).args(["classify", "--group", "D:2", "--f", "6,6"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_FAIL));
    let status = Command::new(bin).args(["classify", "--group", "bogus"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));

    // A table directory whose T table has a broken cell: verification fails with a report.
    let dir = tempfile::tempdir().unwrap();
    let mut t = symfv::certify::TableSet::builtin().get("T").unwrap().clone();
    let cell = &mut t.cells[0];
    let role = *cell.cert.entries.keys().next().unwrap();
    cell.cert.entries.insert(role, "Ico".parse().unwrap());
    cell.alternates.clear();
    std::fs::write(dir.path().join("T.json"), t.to_json()).unwrap();
    let out = Command::new(bin)
        .args(["verify-tables", "--group", "T"])
        .env("SYMFV_TABLE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_FAIL));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failed"], 1);
    assert!(v["errata"]["entries"].as_array().unwrap().iter().any(|e| e["status"] == "fail"));
}
