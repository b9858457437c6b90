use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn finsler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn remark_certificate_verifies() {
    let out = finsler(&[
        "verify",
        "--cert",
        p(&data("remark_cert.json")),
        "--F",
        p(&data("remark_target.json")),
        "--G",
        p(&data("odd_degree_G.json")),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("wqm certificate verified"));
}

#[test]
fn mutated_multiplier_is_localized() {
    let dir = tempfile::tempdir().unwrap();
    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(data("remark_cert.json")).unwrap()).unwrap();
    cert["multipliers"][0][0]["terms"][0]["coef"] = Value::from("8/7");
    let path = dir.path().join("mutated.json");
    std::fs::write(&path, cert.to_string()).unwrap();
    let out = finsler(&[
        "verify",
        "--cert",
        p(&path),
        "--F",
        p(&data("remark_target.json")),
        "--G",
        p(&data("odd_degree_G.json")),
    ]);
    assert_eq!(code(&out), 2);
    let line = stderr(&out).lines().find(|l| l.starts_with('{')).map(str::to_owned).expect("json diagnostic");
    let diag: Value = serde_json::from_str(&line).unwrap();
    assert_eq!(diag["row"], 1);
    assert_eq!(diag["col"], 1);
    assert_eq!(diag["monomial"], serde_json::json!([1]));
}

#[test]
fn chain_prints_every_step() {
    let out = finsler(&["verify", "--cert", p(&data("chain_cert.json")), "--G", p(&data("chain_G.json"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    for k in 1..=7 {
        assert!(text.contains(&format!("eq{k} verified")), "eq{k} missing from\n{text}");
    }
}

#[test]
fn section_csv_is_deterministic() {
    let (f, g) = (data("diag_pair_F.json"), data("diag_pair_G.json"));
    let args = [
        "section",
        "--F",
        p(&f),
        "--G",
        p(&g),
        "--grid",
        "-2:2:9",
    ];
    let (a, b) = (finsler(&args), finsler(&args));
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().count(), 10);
}

#[test]
fn vanishing_constraint_gives_the_whole_line() {
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.json");
    let z = serde_json::json!({"n": 2, "d": 1, "entries": [[{"d": 1, "terms": []}, {"d": 1, "terms": []}], [{"d": 1, "terms": []}, {"d": 1, "terms": []}]]});
    std::fs::write(&zero, z.to_string()).unwrap();
    let out = finsler(&["section", "--F", p(&data("identity_F.json")), "--G", p(&zero), "--grid", "-3:3:7"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 7);
    for row in rows {
        assert!(row.contains("-inf") && row.contains("+inf"), "{row}");
    }
}

#[test]
fn output_file_is_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sections.csv");
    let out = finsler(&[
        "section",
        "--F",
        p(&data("diag_pair_F.json")),
        "--G",
        p(&data("diag_pair_G.json")),
        "--grid",
        "-1:1:5",
        "--out",
        p(&out_path),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(written.lines().count(), 6);
    // No temporary siblings left behind.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n\": 2").unwrap();

    let input = finsler(&["section", "--F", p(&bad), "--G", p(&data("diag_pair_G.json"))]);
    assert_eq!(code(&input), 3);

    let bad_flag = finsler(&["section", "--no-such-flag"]);
    assert_eq!(code(&bad_flag), 3);
    assert_eq!(code(&finsler(&["--help"])), 0);

    let dims = finsler(&["section", "--F", p(&data("diag_pair_F.json")), "--G", p(&data("three_by_three_G.json"))]);
    assert_eq!(code(&dims), 4);

    let shape = finsler(&[
        "witness",
        "--F",
        p(&data("three_by_three_F.json")),
        "--G",
        p(&data("three_by_three_G.json")),
        "--mode",
        "univariate-2x2",
    ]);
    assert_eq!(code(&shape), 4);

    let obstructed = finsler(&[
        "witness",
        "--F",
        p(&data("three_by_three_F.json")),
        "--G",
        p(&data("three_by_three_G.json")),
        "--mode",
        "obstruction",
    ]);
    assert_eq!(code(&obstructed), 6);
}

#[test]
fn global_witness_roundtrips_through_verify_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let out = finsler(&[
        "witness",
        "--F",
        p(&data("identity_F.json")),
        "--G",
        p(&data("minus_identity_G.json")),
        "--mode",
        "nsd-global",
        "--out",
        p(&w),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let check = finsler(&[
        "verify-witness",
        "--cert",
        p(&w),
        "--F",
        p(&data("identity_F.json")),
        "--G",
        p(&data("minus_identity_G.json")),
    ]);
    assert_eq!(code(&check), 0, "{}", stderr(&check));
}

#[test]
fn reproduce_scenarios_pass() {
    for name in ["exmain", "exa", "exb", "sec6"] {
        let out = finsler(&["reproduce", name]);
        assert_eq!(code(&out), 0, "{name}:\n{}{}", stdout(&out), stderr(&out));
        assert!(!stdout(&out).contains("FAIL"));
    }
}
