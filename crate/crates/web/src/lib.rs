//! Browser bindings: classify a family member, list its pole atlas and scan
//! the continued product over a grid. Every export takes the member as text,
//! `"a b | c"` or `"a1 .. an | b"`, and returns a JSON string.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use euler_rigidity::analytic::{self, EvalConfig, Region, ScanGrid};
use euler_rigidity::{witt, FamilySpec};

/// Grid size and prime limit the page may request; a scan runs on the main
/// thread.
pub const MAX_SCAN_POINTS: usize = 40_000;
pub const MAX_SCAN_PRIME_LIMIT: u64 = 100_000;

fn failure(e: euler_rigidity::Error) -> String {
    format!("{}: {e}", e.code())
}

fn parse_family(text: &str) -> Result<FamilySpec, String> {
    text.parse().map_err(failure)
}

/// Rigidity report with the exponent table up to level `level`.
pub fn analyze_report(family: &str, level: u32) -> Result<String, String> {
    let spec = parse_family(family)?;
    let report = witt::classify_rigidity(&spec, level).map_err(failure)?;
    let mut v = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    v["family"] = json!(spec.to_string());
    v["table"] = json!(report.decomposition.to_text_table());
    Ok(v.to_string())
}

/// Candidate poles and zeros inside the rectangle.
pub fn atlas_report(family: &str, level: u32, re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<String, String> {
    let spec = parse_family(family)?;
    let d = witt::decompose(&spec.polynomial(), level).map_err(failure)?;
    let atlas = analytic::pole_atlas(&d, &Region::new(re_min, re_max, im_min, im_max));
    serde_json::to_string(&atlas).map_err(|e| e.to_string())
}

/// `{"res": [..], "ims": [..], "abs": [..], "errors": n}` with `abs` in
/// row-major order (imaginary part outer); failed points are `null`.
#[allow(clippy::too_many_arguments)]
pub fn scan_report(
    family: &str,
    level: u32,
    prime_limit: u64,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    step: f64,
) -> Result<String, String> {
    if prime_limit > MAX_SCAN_PRIME_LIMIT {
        return Err(format!("prime limit {prime_limit} is above the page limit {MAX_SCAN_PRIME_LIMIT}"));
    }
    let spec = parse_family(family)?;
    let h = spec.polynomial();
    let cfg = EvalConfig::default().with_prime_limit(prime_limit).with_level(level);
    cfg.validate().map_err(failure)?;
    let d = witt::decompose(&h, level).map_err(failure)?;
    let grid = ScanGrid { region: Region::new(re_min, re_max, im_min, im_max), step };
    let points = grid.points().map_err(failure)?;
    if points.len() > MAX_SCAN_POINTS {
        return Err(format!("{} grid points requested, the page allows {MAX_SCAN_POINTS}", points.len()));
    }
    let rows = analytic::boundary_scan(&h, &d, &grid, &cfg).map_err(failure)?;

    let mut res: Vec<f64> = Vec::new();
    let mut ims: Vec<f64> = Vec::new();
    for row in &rows {
        if ims.last() != Some(&row.s.im) {
            ims.push(row.s.im);
        }
        if ims.len() == 1 {
            res.push(row.s.re);
        }
    }
    let abs: Vec<Value> = rows.iter().map(|r| r.value.as_ref().map_or(Value::Null, |z| json!(z.norm()))).collect();
    let errors = rows.iter().filter(|r| r.value.is_err()).count();
    Ok(json!({ "res": res, "ims": ims, "abs": abs, "errors": errors, "bound": 1.0 / (level as f64 + 1.0) + analytic::CONTINUATION_MARGIN }).to_string())
}

#[wasm_bindgen]
pub fn analyze(family: &str, level: u32) -> Result<String, JsError> {
    analyze_report(family, level).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn poles(family: &str, level: u32, re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<String, JsError> {
    atlas_report(family, level, re_min, re_max, im_min, im_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn scan(
    family: &str,
    level: u32,
    prime_limit: u32,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    step: f64,
) -> Result<String, JsError> {
    scan_report(family, level, prime_limit as u64, re_min, re_max, im_min, im_max, step).map_err(|e| JsError::new(&e))
}
