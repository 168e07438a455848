use assert_cmd::Command;
use predicates::prelude::*;

fn bin() -> Command {
    Command::cargo_bin("mobius-semigroups").unwrap()
}

fn tuple(name: &str) -> String {
    format!("{}/../../tuples/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn classify_f0_reports_pathological() {
    let out = bin()
        .args(["classify", &tuple("f0.tuple")])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let j: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(j["schema_version"], 1);
    assert_eq!(j["in_P"]["status"], "Yes");
    assert_eq!(j["in_E"]["status"], "CertifiedNo");
    assert_eq!(j["elementary"]["point"], "inf");
}

#[test]
fn classify_uh_pair_certified() {
    let out = bin()
        .args(["classify", &tuple("uh_pair.tuple")])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let j: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(j["in_H"]["status"], "CertifiedYes");
    assert_eq!(j["in_P"]["status"], "No");
}

#[test]
fn classify_is_deterministic() {
    let run = || {
        bin()
            .args(["classify", &tuple("hump.tuple")])
            .assert()
            .success()
            .get_output()
            .stdout
            .clone()
    };
    assert_eq!(run(), run());
}

#[test]
fn malformed_tuple_exits_2() {
    let dir = std::env::temp_dir().join("ms-cli-bad");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.tuple");
    std::fs::write(&path, "1 2 3\n").unwrap();
    bin()
        .args(["classify", path.to_str().unwrap()])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("line 1"));
    bin()
        .args(["classify", "/nonexistent/nope.tuple"])
        .assert()
        .code(2);
}

#[test]
fn certify_outputs_verified_multicone() {
    let out = bin()
        .args(["certify", &tuple("pair_2z3z.tuple")])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let j: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(j["outcome"], "certified");
    assert_eq!(j["verified"], true);
}

#[test]
fn certify_reports_touching_limit_sets() {
    let out = bin()
        .args(["certify", &tuple("hump.tuple")])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let j: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(j["outcome"], "failure");
    assert_eq!(j["kind"], "limit-sets-touch");
}

#[test]
fn spectral_csv_constant_sqrt2() {
    let out = bin()
        .args(["spectral", &tuple("pair_2z3z.tuple"), "--max-len", "6"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "length,min_norm_root,periodic_upper");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let root: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((root - 2.0_f64.sqrt()).abs() < 1e-9, "{row}");
    }
}

#[test]
fn explore_finds_hump_witnesses_absent() {
    let out = bin()
        .args(["explore", &tuple("hump.tuple"), "--max-len", "8"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let j: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert!(j["elliptic_or_identity"].is_null());
    assert!(j["inverse_violation"].is_null());
    assert!(j["identity_approach"].is_null());
}

#[test]
fn explore_reports_elliptic_witness_shape() {
    let dir = std::env::temp_dir().join("ms-cli-rot");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rot.tuple");
    // a rotation generator: elliptic at length 1
    std::fs::write(&path, "1 -1 1 1\n2 0 0 1\n").unwrap();
    let out = bin()
        .args(["explore", path.to_str().unwrap(), "--max-len", "3"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let j: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let w = &j["elliptic_or_identity"];
    assert_eq!(w["kind"], "Elliptic");
    assert_eq!(w["letters"], serde_json::json!([1]));
    assert!(w["matrix"].as_array().unwrap().len() == 2);
}

#[test]
fn limit_set_writes_svg() {
    let dir = std::env::temp_dir().join("ms-cli-svg");
    std::fs::create_dir_all(&dir).unwrap();
    let svg_path = dir.join("hulls.svg");
    bin()
        .args([
            "limit-set",
            &tuple("hump.tuple"),
            "--depth",
            "10",
            "--svg",
            svg_path.to_str().unwrap(),
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"forward\""));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn reproduce_unknown_scenario_exits_2() {
    bin()
        .args(["reproduce", "nope"])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("known:"));
}

#[test]
fn reproduce_f0_passes() {
    bin()
        .args(["reproduce", "f0"])
        .assert()
        .success()
        .stdout(predicate::str::contains("PASS").count(5));
}
