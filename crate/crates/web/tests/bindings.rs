use serde_json::Value;

use euler_rigidity_web::{analyze_report, atlas_report, scan_report, MAX_SCAN_POINTS};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn analyze_both_verdicts() {
    let v = parse(&analyze_report("0 0 | 1", 4).unwrap());
    assert_eq!(v["verdict"], "NATURAL_BOUNDARY");
    assert_eq!(v["first_higher_level"], 2);
    assert!(v["table"].as_str().unwrap().starts_with("  m"));

    let v = parse(&analyze_report("1/2, 1/3 | 5/6", 6).unwrap());
    assert_eq!(v["verdict"], "ENTIRE_MEROMORPHIC");
    assert_eq!(v["identification"], "ζ(s-i/2)ζ(s-i/3)");
    assert_eq!(v["family"], "(1/2, 1/3 | 5/6)");
}

#[test]
fn analyze_reports_errors_with_codes() {
    assert!(analyze_report("0 0 1", 4).unwrap_err().starts_with("invalid-argument:"));
    assert!(analyze_report("0 x | 1", 4).unwrap_err().starts_with("parse-rational:"));
    assert!(analyze_report("0 0 0 | 1", 2).unwrap_err().starts_with("invalid-argument:"));
}

#[test]
fn atlas_window() {
    let v = parse(&atlas_report("0 0 | 1", 3, 0.4, 2.0, -1.0, 1.0).unwrap());
    let kinds: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["POLE", "POLE", "ZERO"]);
    assert_eq!(parse(&atlas_report("0 0 | 1", 3, 5.0, 6.0, 0.0, 0.0).unwrap()), serde_json::json!([]));
}

#[test]
fn scan_shape_and_error_points() {
    let v = parse(&scan_report("0 0 | 1", 3, 1000, 0.2, 0.8, -0.5, 0.5, 0.25).unwrap());
    let res = v["res"].as_array().unwrap();
    let ims = v["ims"].as_array().unwrap();
    assert_eq!(res.len(), 3);
    assert_eq!(ims.len(), 5);
    let abs = v["abs"].as_array().unwrap();
    assert_eq!(abs.len(), 15);
    // Re = 0.2 is below 1/4 + 0.05 on every row
    for row in 0..5 {
        assert!(abs[row * 3].is_null());
        assert!(abs[row * 3 + 1].as_f64().unwrap() > 0.0);
    }
    assert_eq!(v["errors"], 5);
}

#[test]
fn scan_limits() {
    assert!(scan_report("0 0 | 1", 3, 1_000_000, 0.3, 1.0, 0.0, 1.0, 0.1).is_err());
    let too_many = scan_report("0 0 | 1", 3, 100, 0.3, 1.0, -100.0, 100.0, 0.001).unwrap_err();
    assert!(too_many.contains(&MAX_SCAN_POINTS.to_string()) || too_many.starts_with("invalid-argument"), "{too_many}");
    assert!(scan_report("0 0 | 1", 3, 100, 0.3, 1.0, 0.0, 1.0, 0.0).unwrap_err().starts_with("invalid-argument:"));
}
