//! Rendering of command results as text, JSON or CSV.

use std::fmt::Write;

use num_complex::Complex64;
use serde_json::{json, Value};

use euler_rigidity::analytic::{self, EvalConfig, PoleEntry, PoleKind, ScanRow};
use euler_rigidity::datum::EulerDatum;
use euler_rigidity::verify::CheckOutcome;
use euler_rigidity::{FamilySpec, RigidityReport, RigidityVerdict};

use crate::Format;

/// `re+imi` with round-trip float formatting.
pub fn complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im, "abs": z.norm(), "arg": z.arg() })
}

fn error_json(e: &euler_rigidity::Error) -> Value {
    json!({ "error": e.code(), "message": e.to_string() })
}

fn pretty(v: &Value) -> String {
    let mut out = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    out.push('\n');
    out
}

/// Quotes a CSV field when it needs it.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn analyze(r: &RigidityReport, samples: usize, tol: f64, format: Format) -> String {
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(r).expect("reports serialize");
            v["family"] = json!(r.spec.to_string());
            v["samples"] = json!(samples);
            v["tol"] = json!(tol);
            pretty(&v)
        }
        Format::Csv => {
            let mut out = String::from("m,q,lambda\n");
            for (m, q, l) in r.decomposition.entries() {
                let _ = writeln!(out, "{m},{q},{l}");
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let spec = &r.spec;
            let _ = writeln!(out, "family              {spec}");
            let _ = writeln!(out, "degree              {}", spec.degree());
            let sum = spec.shift_sum();
            let relation = if r.algebraic_unitary { "=" } else { "!=" };
            let _ = writeln!(
                out,
                "algebraic test      {} (shift sum {sum} {relation} top shift {})",
                if r.algebraic_unitary { "unitary" } else { "not unitary" },
                spec.top
            );
            match &r.numeric_witness {
                Some(w) => {
                    let moduli: Vec<String> = w.root_moduli.iter().map(|m| format!("{m:.12}")).collect();
                    let _ = writeln!(
                        out,
                        "sampling test       witness at x = {:.12}, root moduli {} ({samples} samples, tol {tol:e})",
                        w.x,
                        moduli.join(", ")
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "sampling test       all reciprocal roots on the unit circle ({samples} samples, tol {tol:e})"
                    );
                }
            }
            let _ = writeln!(out, "verdict             {}", r.verdict);
            match r.verdict {
                RigidityVerdict::EntireMeromorphic => {
                    let _ = writeln!(
                        out,
                        "                    meromorphic in all s: the Euler product equals {}",
                        r.identification.as_deref().unwrap_or("?")
                    );
                }
                RigidityVerdict::NaturalBoundary => {
                    let _ = writeln!(
                        out,
                        "                    meromorphic in Re(s) > 0 with natural boundary Re(s) = 0"
                    );
                }
            }
            let level = r.first_higher_level.map_or("none".to_string(), |m| m.to_string());
            let _ = writeln!(out, "first nonzero level {level} (levels m >= 2)");
            let _ = writeln!(out);
            let _ = writeln!(out, "exponents lambda(m, q) up to M = {}:", r.decomposition.max_level());
            out.push_str(&r.decomposition.to_text_table());
            out
        }
    }
}

pub struct Evaluation<'a> {
    pub spec: &'a FamilySpec,
    pub s: Complex64,
    pub cfg: &'a EvalConfig,
    pub datum: &'a EulerDatum,
    pub direct: euler_rigidity::Result<Complex64>,
    pub continued: euler_rigidity::Result<Complex64>,
}

impl Evaluation<'_> {
    fn delta(&self) -> Option<f64> {
        match (&self.direct, &self.continued) {
            (Ok(a), Ok(b)) => Some((a - b).norm()),
            _ => None,
        }
    }
}

pub fn eval(e: &Evaluation<'_>, format: Format) -> String {
    let methods = [("direct", &e.direct), ("continued", &e.continued)];
    match format {
        Format::Json => {
            let mut v = json!({
                "family": e.spec.to_string(),
                "s": { "re": e.s.re, "im": e.s.im },
                "datum": e.datum.label(),
                "norms": e.datum.len(),
                "level": e.cfg.level,
                "delta": e.delta(),
            });
            for (name, value) in methods {
                v[name] = match value {
                    Ok(z) => complex_json(*z),
                    Err(err) => error_json(err),
                };
            }
            pretty(&v)
        }
        Format::Csv => {
            let mut out = String::from("method,re,im,abs,arg\n");
            for (name, value) in methods {
                match value {
                    Ok(z) => {
                        let _ = writeln!(out, "{name},{},{},{},{}", z.re, z.im, z.norm(), z.arg());
                    }
                    Err(err) => {
                        let _ = writeln!(out, "{name},error,{},,", err.code());
                    }
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "family     {}", e.spec);
            let _ = writeln!(out, "s          {}", complex(e.s));
            let _ = writeln!(out, "datum      {} ({} norms)", e.datum.label(), e.datum.len());
            let _ = writeln!(out, "level M    {}", e.cfg.level);
            for (name, value) in methods {
                match value {
                    Ok(z) => {
                        let _ = writeln!(out, "{name:<10} {}  (|.| = {})", complex(*z), z.norm());
                    }
                    Err(err) => {
                        let _ = writeln!(out, "{name:<10} unavailable: {}: {err}", err.code());
                    }
                }
            }
            match e.delta() {
                Some(d) => {
                    let _ = writeln!(out, "delta      {d:e}");
                }
                None => {
                    let _ = writeln!(out, "delta      n/a");
                }
            }
            out
        }
    }
}

pub fn poles(spec: &FamilySpec, atlas: &[PoleEntry], format: Format) -> String {
    match format {
        Format::Json => pretty(&serde_json::to_value(atlas).expect("atlas entries serialize")),
        Format::Csv => analytic::atlas_to_csv(atlas),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "candidate poles and zeros of {spec}: {} entries", atlas.len());
            for e in atlas {
                let (re, im) = e.exact_location();
                let kind = match e.kind {
                    PoleKind::Pole => "POLE",
                    PoleKind::Zero => "ZERO",
                };
                let _ = writeln!(
                    out,
                    "s = {re} + ({im})i  {kind} of order {}  [m = {}, q = {}, lambda = {}]",
                    e.order, e.m, e.q, e.lambda
                );
            }
            out
        }
    }
}

pub fn scan(rows: &[ScanRow], format: Format) -> String {
    match format {
        Format::Csv => analytic::scan_to_csv(rows),
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|r| match &r.value {
                    Ok(z) => json!({ "re": r.s.re, "im": r.s.im, "abs": z.norm(), "arg": z.arg() }),
                    Err(code) => json!({ "re": r.s.re, "im": r.s.im, "error": code }),
                })
                .collect();
            pretty(&Value::Array(v))
        }
        Format::Text => {
            let mut out = format!("{:>10} {:>10} {:>24} {:>24}\n", "re", "im", "abs", "arg");
            for r in rows {
                match &r.value {
                    Ok(z) => {
                        let _ = writeln!(out, "{:>10} {:>10} {:>24} {:>24}", r.s.re, r.s.im, z.norm(), z.arg());
                    }
                    Err(code) => {
                        let _ = writeln!(out, "{:>10} {:>10} {:>24}", r.s.re, r.s.im, format!("error {code}"));
                    }
                }
            }
            out
        }
    }
}

pub fn verify(outcomes: &[CheckOutcome], format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = String::new();
            for o in outcomes {
                let _ = writeln!(out, "{o}");
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            let _ = writeln!(out, "{passed}/{} checks passed", outcomes.len());
            out
        }
        Format::Json => {
            let v: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "id": o.id,
                        "name": o.name,
                        "passed": o.passed,
                        "seconds": o.elapsed.as_secs_f64(),
                        "detail": o.detail,
                    })
                })
                .collect();
            pretty(&Value::Array(v))
        }
        Format::Csv => {
            let mut out = String::from("id,name,passed,seconds,detail\n");
            for o in outcomes {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    o.id,
                    csv_field(o.name),
                    o.passed,
                    o.elapsed.as_secs_f64(),
                    csv_field(&o.detail)
                );
            }
            out
        }
    }
}
