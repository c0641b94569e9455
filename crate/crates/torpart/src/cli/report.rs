//! Deterministic report formatting.
//!
//! Every float that reaches an output file or stdout is first rounded
//! to 12 significant digits and then printed as the shortest decimal
//! that round-trips the rounded value. Reruns with the same inputs
//! therefore produce byte-identical artifacts, and diffs between runs
//! show real changes instead of last-bit noise. JSON objects are
//! emitted with sorted keys for the same reason.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::Result;

/// Round to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float reparses")
}

/// Shortest decimal form of the 12-significant-digit rounding.
pub fn fmt12(x: f64) -> String {
    format!("{}", sig12(x))
}

/// Round every float in a JSON tree to 12 significant digits.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            // Integers pass through untouched; only true floats are
            // rounded.
            if n.as_i64().is_none() && n.as_u64().is_none() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(sig12(x)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty-print a JSON report with rounded floats and a trailing
/// newline.
pub fn render_json(mut value: Value) -> String {
    round_json(&mut value);
    let mut s = serde_json::to_string_pretty(&value).expect("JSON reports serialize");
    s.push('\n');
    s
}

/// Write a rendered report to the given path, or to stdout when no
/// path is set.
pub fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
