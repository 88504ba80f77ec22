//! Reports validate against the published schema; q = 8 outputs match the golden files.
//! Set `ARCGEOM_BLESS=1` to rewrite the golden files.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn arcgeom(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_arcgeom")).args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{args:?}");
    out.stdout
}

fn manifest(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(manifest("schema/report.schema.json")).unwrap();
    jsonschema::JSONSchema::compile(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(s: &jsonschema::JSONSchema, v: &Value) {
    if let Err(errors) = s.validate(v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("schema violations: {msgs:#?}");
    }
}

#[test]
fn reports_match_schema() {
    let s = schema();
    for args in [
        &["verify", "--n", "3"][..],
        &["verify", "--n", "4", "--h", "3", "--suite", "points", "--suite", "planes"],
        &["tables", "--n", "3", "--table", "8"],
        &["tables", "--n", "4"],
    ] {
        let v: Value = serde_json::from_slice(&arcgeom(args)).unwrap();
        assert_valid(&s, &v);
    }
}

fn golden(name: &str, actual: &str) {
    let path = manifest("tests/golden").join(name);
    if std::env::var_os("ARCGEOM_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(want == actual, "{name} differs from golden output");
}

#[test]
fn golden_q8() {
    let mut v: Value = serde_json::from_slice(&arcgeom(&["verify", "--n", "3", "--suite", "all"])).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    golden("verify_n3_h1.json", &(serde_json::to_string_pretty(&v).unwrap() + "\n"));
    let csv = String::from_utf8(arcgeom(&["tables", "--n", "3", "--format", "csv"])).unwrap();
    golden("tables_n3_h1.csv", &csv);
    let md = String::from_utf8(arcgeom(&["orbits", "--n", "3", "--kind", "line", "--format", "markdown"])).unwrap();
    golden("orbits_line_n3_h1.md", &md);
}
