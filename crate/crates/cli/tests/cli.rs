use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_euler-rigidity"));
    cmd.env_remove("EULER_RIGIDITY_CONFIG");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", stderr(&out));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("euler-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Exit status and the single machine-readable line on stderr.
fn expect_error(args: &[&str], status: i32, code: &str) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(status), "{args:?}: {}", stderr(&out));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{args:?}: {err:?}");
    assert!(err.starts_with(&format!("error: {code}: ")), "{args:?}: {err:?}");
    assert!(out.stdout.is_empty());
}

fn table(v: &Value) -> Vec<(u64, String, i64)> {
    v["decomposition"]["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["m"].as_u64().unwrap(), f["q"].as_str().unwrap().to_string(), f["lambda"].as_i64().unwrap()))
        .collect()
}

#[test]
fn analyze_non_unitary_member() {
    let out = run(&["analyze", "--abc", "0", "0", "1", "-M", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("NATURAL_BOUNDARY"));
    assert!(text.contains("first nonzero level 2"));
    assert!(text.contains("exponents lambda(m, q) up to M = 6"));

    let v = json(&["analyze", "--abc", "0", "0", "1", "-M", "3", "--format", "json"]);
    assert_eq!(v["verdict"], "NATURAL_BOUNDARY");
    assert_eq!(v["first_higher_level"], 2);
    assert_eq!(v["algebraic_unitary"], false);
    assert!(v["numeric_witness"].is_object());
    // (1 - 2T + chi_1 T^2) = (1 - T)^2 (1 - T^2)^1 (1 - chi_1 T^2)^-1 (1 - T^3)^2 (1 - chi_1 T^3)^-2 mod T^4
    let want = [(1, "0", 2), (2, "0", 1), (2, "1", -1), (3, "0", 2), (3, "1", -2)];
    let want: Vec<_> = want.iter().map(|&(m, q, l)| (m, q.to_string(), l)).collect();
    assert_eq!(table(&v), want);
}

#[test]
fn analyze_json_table_is_the_library_table() {
    use euler_rigidity::{witt, FamilySpec};
    let v = json(&["analyze", "--chain", "0", "1/2", "-1/3", "--b", "2", "-M", "7", "--format", "json"]);
    let spec: FamilySpec = "0 1/2 -1/3 | 2".parse().unwrap();
    let d = witt::decompose(&spec.polynomial(), 7).unwrap();
    assert_eq!(v["decomposition"], serde_json::to_value(&d).unwrap());
    assert_eq!(v["first_higher_level"], 3);
}

#[test]
fn analyze_unitary_member() {
    let out = run(&["analyze", "--abc", "1/2", "1/3", "5/6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("ENTIRE_MEROMORPHIC"));
    assert!(text.contains("ζ(s-i/2)ζ(s-i/3)"), "{text}");

    let v = json(&["analyze", "--abc", "1/2", "1/3", "5/6", "--format", "json"]);
    assert_eq!(v["identification"], "ζ(s-i/2)ζ(s-i/3)");
    assert_eq!(v["numeric_witness"], Value::Null);
    assert_eq!(table(&v), vec![(1, "1/3".into(), 1), (1, "1/2".into(), 1)]);
}

#[test]
fn analyze_csv_table() {
    let out = run(&["analyze", "--abc", "0", "0", "1", "-M", "2", "--format", "csv"]);
    assert_eq!(stdout(&out), "m,q,lambda\n1,0,2\n2,0,1\n2,1,-1\n");
}

#[test]
fn negative_rationals_on_the_command_line() {
    let v = json(&["analyze", "--abc", "-1/2", "1/3", "-1/6", "--format", "json"]);
    assert_eq!(v["verdict"], "ENTIRE_MEROMORPHIC");
    assert_eq!(v["family"], "(-1/2, 1/3 | -1/6)");
    let v = json(&["analyze", "--chain", "-1", "-2", "--b", "-3", "--format", "json"]);
    assert_eq!(v["verdict"], "ENTIRE_MEROMORPHIC");
}

#[test]
fn eval_both_methods_agree_for_zeta_squared() {
    let v = json(&["eval", "--abc", "0", "0", "0", "--s", "2+0i", "--format", "json"]);
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    for method in ["direct", "continued"] {
        assert!((v[method]["re"].as_f64().unwrap() - zeta2 * zeta2).abs() < 1e-6, "{method}: {v}");
        assert!(v[method]["im"].as_f64().unwrap().abs() < 1e-12);
    }
    assert!(v["delta"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["norms"], 78498);
}

#[test]
fn eval_inside_the_strip_has_no_direct_value() {
    let v = json(&["eval", "--abc", "0", "0", "1", "--s", "0.6+1i", "-P", "10000", "--format", "json"]);
    assert_eq!(v["direct"]["error"], "convergence-region");
    assert!(v["continued"]["abs"].as_f64().unwrap().is_finite());
    assert_eq!(v["delta"], Value::Null);

    let out = run(&["eval", "--abc", "0", "0", "1", "--s", "0.6+1i", "-P", "10000", "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.starts_with("method,re,im,abs,arg\ndirect,error,convergence-region,,\ncontinued,"), "{text}");
}

#[test]
fn eval_over_a_custom_datum() {
    let dir = scratch("datum");
    let path = dir.join("norms.txt");
    std::fs::write(&path, "# three primes\n5\n2\n3\n").unwrap();
    let v = json(&["eval", "--abc", "0", "0", "0", "--s", "2", "--datum", path.to_str().unwrap(), "--format", "json"]);
    // (4/3)^2 (9/8)^2 (25/24)^2
    assert!((v["direct"]["re"].as_f64().unwrap() - 2.44140625).abs() < 1e-13);
    assert_eq!(v["continued"]["error"], "custom-datum");
    assert_eq!(v["norms"], 3);

    std::fs::write(&path, "2\n0.5\n").unwrap();
    expect_error(&["eval", "--abc", "0", "0", "0", "--s", "2", "--datum", path.to_str().unwrap()], 1, "datum-norm");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn poles_in_all_formats() {
    let v = json(&["poles", "--abc", "0", "0", "1", "-M", "3", "--format", "json"]);
    let entries = v.as_array().unwrap();
    let got: Vec<(f64, f64, &str, i64)> = entries
        .iter()
        .map(|e| (e["re"].as_f64().unwrap(), e["im"].as_f64().unwrap(), e["kind"].as_str().unwrap(), e["order"].as_i64().unwrap()))
        .collect();
    let third = 1.0 / 3.0;
    assert_eq!(
        got,
        vec![
            (1.0, 0.0, "POLE", 2),
            (0.5, 0.0, "POLE", 1),
            (0.5, 0.5, "ZERO", 1),
            (third, 0.0, "POLE", 2),
            (third, third, "ZERO", 2)
        ]
    );

    let out = run(&["poles", "--abc", "0", "0", "1", "-M", "3", "--format", "csv", "--re", "0.4:2"]);
    assert_eq!(stdout(&out), "re,im,kind,order,m,q,lambda\n1,0,POLE,2,1,0,2\n0.5,0,POLE,1,2,0,1\n0.5,0.5,ZERO,1,2,1,-1\n");

    let out = run(&["poles", "--abc", "0", "0", "1", "-M", "3", "--re", "5:6"]);
    assert!(stdout(&out).contains(": 0 entries"));
}

#[test]
fn scan_is_deterministic_across_thread_counts() {
    let args = ["scan", "--abc", "0", "0", "1", "-M", "3", "-P", "2000", "--re", "0.2:0.8", "--im", "-1:1", "--step", "0.25"];
    let serial = run(&args);
    assert!(serial.status.success(), "{}", stderr(&serial));
    let text = stdout(&serial);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "re,im,abs,arg");
    // 3 real parts by 9 imaginary parts
    assert_eq!(lines.len(), 1 + 3 * 9);
    assert_eq!(lines[1], "0.2,-1,error,convergence-region");

    let mut threaded_args = args.to_vec();
    threaded_args.extend(["--threads", "3"]);
    assert_eq!(run(&threaded_args).stdout, serial.stdout);
    assert_eq!(run(&args).stdout, serial.stdout);
}

#[test]
fn scan_json_marks_error_rows() {
    let v = json(&["scan", "--abc", "0", "0", "1", "-M", "3", "-P", "100", "--re", "0.2:0.2", "--im", "0:0", "--format", "json"]);
    assert_eq!(v, serde_json::json!([{ "re": 0.2, "im": 0.0, "error": "convergence-region" }]));
}

#[test]
fn outputs_are_byte_identical_between_runs() {
    for args in [
        vec!["analyze", "--abc", "0", "1/2", "1", "--format", "json"],
        vec!["eval", "--chain", "0", "1", "2", "--b", "1/2", "--s", "1.5-2i", "-P", "50000"],
        vec!["poles", "--abc", "0", "0", "1", "-M", "8", "--format", "csv"],
    ] {
        assert_eq!(run(&args).stdout, run(&args).stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_a_file() {
    let dir = scratch("out");
    let path = dir.join("atlas.json");
    let out = run(&["poles", "--abc", "0", "0", "1", "-M", "2", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_file_from_the_environment() {
    let dir = scratch("config");
    let path = dir.join("cfg.toml");
    std::fs::write(&path, "level = 3\nsamples = 8\n").unwrap();
    let out = bin()
        .args(["analyze", "--abc", "0", "0", "1", "--format", "json"])
        .env("EULER_RIGIDITY_CONFIG", &path)
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["decomposition"]["max_level"], 3);
    assert_eq!(v["samples"], 8);

    // flags win over the file
    let out = bin()
        .args(["analyze", "--abc", "0", "0", "1", "-M", "4", "--format", "json"])
        .env("EULER_RIGIDITY_CONFIG", &path)
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["decomposition"]["max_level"], 4);

    std::fs::write(&path, "levels = 3\n").unwrap();
    expect_error(&["--config", path.to_str().unwrap(), "analyze", "--abc", "0", "0", "1"], 1, "config");
    expect_error(&["--config", dir.join("missing.toml").to_str().unwrap(), "analyze", "--abc", "0", "0", "1"], 1, "config");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn domain_errors_exit_one() {
    expect_error(&["analyze", "--abc", "0", "0"], 1, "arity");
    expect_error(&["analyze", "--chain", "1", "--b", "1"], 1, "arity");
    expect_error(&["analyze", "--abc", "0", "x", "1"], 1, "parse-rational");
    expect_error(&["analyze", "--abc", "1/0", "0", "1"], 1, "parse-rational");
    expect_error(&["analyze", "--abc", "0.5", "0", "1"], 1, "parse-rational");
    expect_error(&["analyze", "--abc", "0", "0", "1", "-M", "1"], 1, "invalid-argument");
    expect_error(&["analyze", "--chain", "0", "0", "0", "--b", "1", "-M", "2"], 1, "invalid-argument");
    expect_error(&["eval", "--abc", "0", "0", "1", "--s", "2+x"], 1, "parse-complex");
    expect_error(&["eval", "--abc", "0", "0", "1", "--s", "0.1", "-M", "3"], 1, "convergence-region");
    expect_error(&["eval", "--abc", "0", "0", "1", "--s", "1"], 1, "zeta-factor-pole");
    expect_error(&["eval", "--abc", "0", "0", "1", "--s", "2", "-P", "20000000"], 1, "prime-limit");
    expect_error(&["eval", "--abc", "0", "0", "1", "--s", "2", "--datum", "/nonexistent/norms.txt"], 1, "io");
    expect_error(&["scan", "--abc", "0", "0", "1", "--step", "0"], 1, "invalid-argument");
}

#[test]
fn usage_errors_exit_two() {
    expect_error(&[], 2, "usage");
    expect_error(&["frobnicate"], 2, "usage");
    expect_error(&["analyze"], 2, "usage");
    expect_error(&["analyze", "--abc", "0", "0", "1", "--bogus"], 2, "usage");
    expect_error(&["analyze", "--chain", "1", "2"], 2, "usage");
    expect_error(&["analyze", "--abc", "0", "0", "1", "--chain", "1", "2", "--b", "3"], 2, "usage");
    expect_error(&["analyze", "--abc", "0", "0", "1", "-M", "six"], 2, "usage");
    expect_error(&["eval", "--abc", "0", "0", "1"], 2, "usage");
    expect_error(&["poles", "--abc", "0", "0", "1", "--format", "xml"], 2, "usage");
    expect_error(&["verify", "--check", "9"], 2, "usage");
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("analyze"));
}

#[test]
fn verify_single_checks() {
    let out = run(&["verify", "--check", "8", "--check", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("[PASS] 8. zeta sanity"), "{text}");
    assert!(text.contains("[PASS] 2. level-2 law"));
    assert!(text.ends_with("2/2 checks passed\n"));

    let v = json(&["verify", "--check", "3", "--format", "json"]);
    assert_eq!(v[0]["id"], 3);
    assert_eq!(v[0]["passed"], true);
}
