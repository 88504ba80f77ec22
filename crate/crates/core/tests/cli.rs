use std::process::{Command, Output};

fn arcgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arcgeom")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn verify_q8_passes() {
    let out = arcgeom(&["verify", "--n", "3", "--h", "1", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["pass"], true);
    let lines = v["suites"].as_array().unwrap().iter().find(|s| s["name"] == "lines").unwrap();
    let census = lines["checks"].as_array().unwrap().iter().find(|c| c["name"] == "line orbits").unwrap();
    assert_eq!(census["computed"], "22");
    let ids: Vec<i64> = v["tables"].as_array().unwrap().iter().map(|t| t["id"].as_i64().unwrap()).collect();
    assert_eq!(ids, [1, 2, 3, 5, 6, 7, 8]);
}

#[test]
fn rejects_bad_parameters() {
    for args in [
        &["verify", "--n", "4", "--h", "2"][..],
        &["verify", "--n", "2"],
        &["verify", "--n", "9"],
        &["verify", "--n", "6"],
        &["verify", "--n", "7", "--extended", "--suite", "lines"],
        &["verify", "--n", "3", "--h", "2", "--suite", "incidence"],
        &["tables", "--n", "3", "--table", "4"],
        &["tables", "--n", "4", "--table", "3"],
        &["tables", "--n", "3", "--h", "2", "--table", "5"],
        &["tables", "--n", "3", "--table", "9"],
        &["frobnicate"],
    ] {
        assert_eq!(arcgeom(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn point_sizes_for_h3() {
    let out = arcgeom(&["verify", "--n", "4", "--h", "3", "--suite", "points"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["suites"][0]["checks"].as_array().unwrap();
    let sizes = checks.iter().find(|c| c["name"] == "point orbit sizes").unwrap();
    assert_eq!(sizes["computed"], "[17, 1360, 2040, 272, 680]");
}

#[test]
fn table4_at_q16_markdown() {
    let out = arcgeom(&["tables", "--n", "4", "--table", "4", "--format", "markdown"]);
    assert_eq!(out.status.code(), Some(0));
    let md = String::from_utf8(out.stdout).unwrap();
    assert!(md.contains("## Table 4"));
    assert!(!md.contains('≠'));
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = arcgeom(&["tables", "--n", "3", "--table", "1", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["section", "name", "row", "col", "formula", "expected", "computed", "pass"]);
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|x| &x[7] == "true"));
}

#[test]
fn orbit_inventory() {
    let out = arcgeom(&["orbits", "--n", "3", "--kind", "line"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let orbits = v["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 22);
    let total: u64 = orbits.iter().map(|o| o["size"].as_u64().unwrap()).sum();
    assert_eq!(total, 4745);
    let labels: Vec<&str> = orbits.iter().map(|o| o["label"].as_str().unwrap()).collect();
    assert_eq!(labels.iter().filter(|l| l.starts_with("tangent")).count(), 1);
    assert!(labels.iter().any(|l| l.starts_with("generator")));
}

#[test]
fn table8_row_notes() {
    let out = arcgeom(&["tables", "--n", "3", "--table", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let t = &v["tables"][0];
    assert_eq!(t["rows"].as_array().unwrap().len(), t["row_notes"].as_array().unwrap().len());
    assert!(t["row_notes"][0].as_str().unwrap().starts_with("u="));
}
