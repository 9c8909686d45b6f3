//! Deterministic output assembly: JSON envelopes carrying the exact
//! RunConfig, CSV bodies prefixed with a config comment line, and decimal
//! renderings of enclosures with outward rounding.

use num_rational::BigRational;
use serde_json::{json, Value};
use spectra_core::arith::{decimal_mid_half, decimal_string, rat, Dir};
use spectra_core::Enclosure;

use crate::args::RunConfig;

/// Decimal places that resolve the configured tolerance, plus two guard
/// digits, clamped to a readable ceiling.
pub fn display_digits(cfg: &RunConfig) -> u32 {
    let mut digits = 1u32;
    let mut p = rat(1, 10);
    while p > cfg.tol && digits < 40 {
        digits += 1;
        p /= BigRational::from_integer(10.into());
    }
    digits + 2
}

pub fn enclosure_json(e: &Enclosure, cfg: &RunConfig) -> Value {
    let digits = display_digits(cfg);
    let (mid, half) = decimal_mid_half(e, digits);
    let mut m = serde_json::Map::new();
    m.insert("decimal".into(), json!(format!("{mid} +/- {half}")));
    m.insert(
        "lo".into(),
        json!(decimal_string(e.lo(), digits, Dir::Down)),
    );
    m.insert("hi".into(), json!(decimal_string(e.hi(), digits, Dir::Up)));
    if cfg.exact {
        m.insert("exact_lo".into(), json!(e.lo().to_string()));
        m.insert("exact_hi".into(), json!(e.hi().to_string()));
    }
    Value::Object(m)
}

pub fn rational_json(x: &BigRational, cfg: &RunConfig) -> Value {
    let digits = display_digits(cfg);
    let mut m = serde_json::Map::new();
    m.insert(
        "decimal".into(),
        json!(decimal_string(x, digits, Dir::Down)),
    );
    if cfg.exact {
        m.insert("exact".into(), json!(x.to_string()));
    }
    Value::Object(m)
}

pub fn json_output(command: &str, cfg: &RunConfig, result: Value) -> String {
    let v = json!({
        "command": command,
        "config": cfg.to_json(),
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&v).expect("reports always serialize");
    text.push('\n');
    text
}

pub fn csv_output(cfg: &RunConfig, header: &str, rows: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&cfg.comment_line());
    out.push('\n');
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(r);
        out.push('\n');
    }
    out
}

pub fn enclosure_csv_row(name: &str, e: &Enclosure, cfg: &RunConfig) -> String {
    let digits = display_digits(cfg);
    let mut row = format!(
        "{name},{},{}",
        decimal_string(e.lo(), digits, Dir::Down),
        decimal_string(e.hi(), digits, Dir::Up)
    );
    if cfg.exact {
        row.push_str(&format!(",{},{}", e.lo(), e.hi()));
    }
    row
}

pub fn scalar_csv_header(cfg: &RunConfig) -> &'static str {
    if cfg.exact {
        "quantity,lo,hi,exact_lo,exact_hi"
    } else {
        "quantity,lo,hi"
    }
}

/// The machine-readable error body printed on any failure.
pub fn error_json(message: &str, exit: i32) -> String {
    serde_json::to_string_pretty(&json!({
        "error": { "message": message, "exit": exit }
    }))
    .expect("errors always serialize")
}
