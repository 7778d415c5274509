use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn chamberlain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chamberlain"))
        .args(args)
        .env_remove("CHAMBERLAIN_VERBOSE")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sod_on_cubic_fourfold() {
    let f = fixture("cubic_fourfold.toml");
    let out = chamberlain(&["sod", path_str(&f), "--side", "K"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let ledger = &v["result"]["ledger"];
    assert_eq!(ledger["total_exceptional"], 3);
    assert_eq!(ledger["lower_bound"], false);
    let residual = &ledger["blocks"][0];
    assert_eq!(residual["kind"], "residual");
    assert!(residual["cy_labels"].as_array().unwrap().contains(&Value::from("K-CY")));
    // provenance of the count
    let ex = &ledger["blocks"][1];
    assert_eq!(ex["kind"], "exceptional");
    assert_eq!(ex["r"], 3);
    assert_eq!(ex["wall_rank"], 1);
    assert_eq!(ex["wall"], ledger["crossings"][0]["wall"]);
}

#[test]
fn sod_anti_k_side() {
    let f = fixture("cubic_fourfold.toml");
    let out = chamberlain(&["sod", path_str(&f), "--side", "-K"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["ledger"]["side"], "-K");
    assert_eq!(v["result"]["ledger"]["total_exceptional"], 0);
}

#[test]
fn audit_on_quintic() {
    let f = fixture("quintic.toml");
    let out = chamberlain(&["audit", path_str(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let r = &v["result"];
    assert_eq!(r["kuznetsov_chambers"].as_array().unwrap().len(), 2);
    assert_eq!(r["connecting_walls"][0]["r"], 0);
    assert_eq!(r["passed"], true);
}

#[test]
fn visitor_on_two_quadrics() {
    let f = fixture("two_quadrics_visitor.toml");
    let out = chamberlain(&["visitor", path_str(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["total_exceptional"], 6);
    assert_eq!(v["result"]["fano_host"]["passed"], true);
    assert_eq!(v["result"]["r"], 1);
}

#[test]
fn ci_and_cy() {
    let f = fixture("two_quadrics_ci.toml");
    let v = json_of(&chamberlain(&["ci", path_str(&f)]));
    assert_eq!(v["result"]["matches_quotient"], true);
    assert_eq!(v["result"]["projection"]["commutes"], true);
    assert_eq!(v["result"]["ledger_k"]["total_exceptional"], 2);
    let v = json_of(&chamberlain(&["cy", path_str(&fixture("cubic_fourfold.toml"))]));
    assert_eq!(v["result"]["q"], "1/2");
}

#[test]
fn undefined_side_exits_two() {
    let f = fixture("projective_line.toml");
    let out = chamberlain(&["sod", path_str(&f), "--side", "K"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["code"], "undefined_side");
    let out = chamberlain(&["sod", path_str(&f), "--side", "-K"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn parse_error_exits_one() {
    let f = fixture("bad_weight.toml");
    let out = chamberlain(&["gkz", path_str(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["error"]["code"], "parse");
    assert!(v["error"]["message"].as_str().unwrap().contains("line 12"));
    let out = chamberlain(&["gkz", "/nonexistent/file.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_byte_stable() {
    let f = fixture("conic_p1xp1.toml");
    for cmd in ["sod", "kuznetsov", "ci", "audit"] {
        let a = chamberlain(&[cmd, path_str(&f), "--seed", "3"]);
        let b = chamberlain(&[cmd, path_str(&f), "--seed", "3"]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
    let v = json_of(&chamberlain(&["sod", path_str(&f), "--seed", "3"]));
    assert_eq!(v["result"]["ledger"]["path"]["seed"], 3);
}

#[test]
fn side_and_format_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("cubic_fourfold.toml"))
        .unwrap()
        .replace("side = \"K\"", "side = \"-K\"\nformat = \"text\"");
    let path = dir.path().join("anti.toml");
    std::fs::write(&path, text).unwrap();
    let out = chamberlain(&["sod", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("side -K:"), "{stdout}");
}

#[test]
fn torsion_warning_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torsion.toml");
    std::fs::write(
        &path,
        "theta = [1]\n[group]\nfree_rank = 1\ntorsion = [2]\n\
         [[coordinate]]\nname = \"x\"\nweight = [1]\ntorsion = [3]\n\
         [[coordinate]]\nname = \"y\"\nweight = [1]\ntorsion = [0]\n",
    )
    .unwrap();
    let out = chamberlain(&["gkz", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let v = json_of(&out);
    assert_eq!(v["input"]["coordinates"][0]["torsion"][0], 1);
}

fn edges(dot: &str) -> usize {
    dot.matches(" -- ").count()
}

fn nodes(dot: &str) -> usize {
    dot.lines().filter(|l| l.contains("[label=") && !l.contains(" -- ")).count()
}

#[test]
fn dot_export() {
    let out = chamberlain(&["dot", path_str(&fixture("cubic_fourfold.toml"))]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert_eq!((nodes(&dot), edges(&dot)), (2, 1));
    assert!(dot.contains("r=3"));
    assert!(dot.contains("geometric"));

    let out = chamberlain(&["dot", path_str(&fixture("conic_p1xp1.toml"))]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert_eq!((nodes(&dot), edges(&dot)), (3, 3));

    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("graph.dot");
    let out = chamberlain(&[
        "dot",
        path_str(&fixture("two_quadrics_visitor.toml")),
        "-o",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(&target).unwrap();
    assert_eq!((nodes(&dot), edges(&dot)), (1, 0));
}
