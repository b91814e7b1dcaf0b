use std::process::{Command, Output};

use hyperharmonic::Rational;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperharmonic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn compute_prints_closed_form_parts() {
    let out = bin(&["compute", "18", "8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value = text.lines().next().unwrap().rsplit(" = ").next().unwrap();
    let parsed: Rational = value.parse().unwrap();
    assert_eq!(parsed, Rational::new(10914604807i64, 18564).unwrap());
    assert!(text.contains("C(25, 7) = 480700"));
    assert!(text.contains("nu2 = -2, case1"));
}

#[test]
fn compute_json_values_parse() {
    let out = bin(&["--json", "compute", "3", "2"]);
    let line = &json_lines(&out)[0];
    let value: Rational = line["value"].as_str().unwrap().parse().unwrap();
    assert_eq!(value, Rational::new(13, 3).unwrap());
    assert_eq!(line["integer"], false);
    assert_eq!(line["norm"]["nu2"], 0);
}

#[test]
fn compute_r_one_is_harmonic() {
    let text = stdout(&bin(&["compute", "4", "1"]));
    assert!(text.contains("H_4^(1) = 25/12"));
    assert!(text.contains("|H_4^(1)|_2 = 2^2   (nu2 = -2, case1)"));
}

#[test]
fn norm_check_agrees() {
    let out = bin(&["norm", "2", "5", "--check"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("nu2 = -1, case2"), "{text}");
    assert!(text.contains("agrees"));

    let line = &json_lines(&bin(&["--json", "norm", "1000"]))[0];
    assert_eq!(line["nu2"], -9);
    assert_eq!(line["case"], "harmonic");
}

#[test]
fn norm_huge_indices_without_check() {
    let out = bin(&["--json", "norm", "1000000000000", "3"]);
    assert!(out.status.success());
    assert!(json_lines(&out)[0]["nu2"].is_i64());
}

#[test]
fn stirling_rows() {
    let text = stdout(&bin(&["stirling", "2", "4"]));
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[2].ends_with("6 5 1"), "{}", rows[2]);
    let lines = json_lines(&bin(&["--json", "stirling", "0", "3"]));
    assert_eq!(lines[3]["entries"], serde_json::json!(["0", "2", "3", "1"]));
}

#[test]
fn verify_small_suites_pass() {
    for (suite, n_max) in [
        ("theorem1", "256"),
        ("lemma3", "200"),
        ("corollaries", "256"),
        ("stirling", "7"),
    ] {
        let out = bin(&["verify", suite, "--n-max", n_max]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        assert!(stdout(&out).starts_with(&format!("PASS {suite}")));
    }
    let out = bin(&["--json", "verify", "theorem5", "--n-max", "64", "--r-max", "16"]);
    let summary = json_lines(&out).pop().unwrap();
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["checked"], 64 * 16);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "stirling", "--n-max", "10"][..],
        &["compute", "0", "3"],
        &["compute", "200000", "5"],
        &["stirling", "5", "3"],
        &["search-integer", "--n-min", "10", "--n-max", "5"],
        &["search-integer", "--threads", "0"],
        &["bench", "10", "3", "--repetitions", "0"],
        &["frobnicate"],
    ] {
        assert_eq!(bin(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn search_integer_text_and_json() {
    let args = ["--n-max", "20", "--r-max", "20"];
    let text = stdout(&bin(&[&["search-integer"][..], &args].concat()));
    assert!(text.contains("integers 0"), "{text}");

    let out = bin(&[&["--json", "search-integer", "--mode", "exact"][..], &args].concat());
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 19 * 19);
    assert_eq!(lines[0]["n"], 2);
    assert_eq!(lines[0]["confirmation"], "exact");
    assert!(lines.iter().all(|l| l["integer"] == false && l["value"].is_string()));

    let fast = json_lines(&bin(
        &[&["--json", "search-integer", "--mode", "fast"][..], &args].concat()
    ));
    assert!(fast
        .iter()
        .any(|l| l["confirmation"] == "fast" && l.get("value").is_none()));
    let flags = |ls: &[Value]| ls.iter().map(|l| l["integer"].clone()).collect::<Vec<_>>();
    assert_eq!(flags(&fast), flags(&lines));
}

#[test]
fn search_integer_resumes_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("scan.json");
    let ckpt = ckpt.to_str().unwrap();
    let grid = ["--n-max", "40", "--r-max", "30"];

    let full = stdout(&bin(&[&["--json", "search-integer"][..], &grid].concat()));
    let first = bin(&[
        &["--json", "search-integer", "--checkpoint", ckpt, "--stop-after", "300"][..],
        &grid,
    ]
    .concat());
    assert!(first.status.success());
    assert!(stdout(&first).starts_with("stopped after"));
    let resumed = bin(&[&["--json", "search-integer", "--checkpoint", ckpt][..], &grid].concat());
    assert_eq!(stdout(&resumed), full);

    let other = bin(&["search-integer", "--checkpoint", ckpt, "--n-max", "41", "--r-max", "30"]);
    assert_eq!(other.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&other.stderr).contains("mismatch"));
    let other_mode = bin(&[&["search-integer", "--mode", "exact", "--checkpoint", ckpt][..], &grid].concat());
    assert_eq!(other_mode.status.code(), Some(2));
}

#[test]
fn corrupt_checkpoint_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("bad.json");
    std::fs::write(&ckpt, "{not json").unwrap();
    let out = bin(&["search-integer", "--checkpoint", ckpt.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_collision_outputs() {
    let text = stdout(&bin(&[
        "search-collision",
        "--n-min",
        "1",
        "--n-max",
        "1",
        "--r-min",
        "1",
        "--r-max",
        "3",
        "--constraint",
        "either",
    ]));
    assert!(text.contains("EQUAL    H_1^(1) = H_1^(2) = 1"), "{text}");
    assert!(text.contains("collisions 3"));

    let lines = json_lines(&bin(&["--json", "search-collision", "--n-max", "30", "--r-max", "30"]));
    assert!(lines.is_empty());
}

#[test]
fn bench_reports_agreement() {
    let out = bin(&["--json", "bench", "500", "20", "--repetitions", "1"]);
    assert!(out.status.success());
    let line = &json_lines(&out)[0];
    assert_eq!(line["agree"], true);
    assert_eq!(line["fast_nu2"], line["exact_nu2"]);
}
