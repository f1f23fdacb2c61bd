//! Report serialization: canonical JSON (sorted keys, 17 significant digits,
//! non-finite numbers as `null`) and sweep CSV.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "hardylab-report/1";
pub const CSV_HEADER: &str = "axis,measured,predicted,abs_error";

/// A float with 17 significant digits, or `null` when not finite.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    format!("{x:.16e}")
}

fn write_string(out: &mut String, s: &str) {
    out.push_str(&serde_json::to_string(s).expect("strings serialize"));
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("f64 number")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => write_string(out, s),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, indent + 2);
                write_value(out, item, indent + 2);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                pad(out, indent + 2);
                write_string(out, key);
                out.push_str(": ");
                write_value(out, &map[*key], indent + 2);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Canonical JSON text of `value`, newline terminated.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Io(format!("serialization failed: {e}")))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

/// One row of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub axis: String,
    pub measured: f64,
    pub predicted: f64,
    pub abs_error: f64,
}

impl SweepRow {
    pub fn new(axis: impl Into<String>, measured: f64, predicted: f64) -> Self {
        SweepRow {
            axis: axis.into(),
            measured,
            predicted,
            abs_error: (measured - predicted).abs(),
        }
    }
}

/// CSV text with the fixed [`CSV_HEADER`]; non-finite numbers are written
/// as `nan`, `inf` or `-inf`.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let num = |x: f64| {
        if x.is_nan() {
            "nan".to_string()
        } else if x.is_infinite() {
            if x > 0.0 { "inf" } else { "-inf" }.to_string()
        } else {
            format_float(x)
        }
    };
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let axis = if r.axis.contains([',', '"']) {
            format!("\"{}\"", r.axis.replace('"', "\"\""))
        } else {
            r.axis.clone()
        };
        let _ = writeln!(out, "{axis},{},{},{}", num(r.measured), num(r.predicted), num(r.abs_error));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_full_precision() {
        let v = json!({"zeta": 1, "alpha": [0.1, f64::NAN], "mid": {"b": true, "a": "x"}});
        let s = to_canonical_json(&v).unwrap();
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"mid\"").unwrap());
        assert!(s.find("\"mid\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("null"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["alpha"][0].as_f64().unwrap(), 0.1);
        assert_eq!(back["zeta"], 1);
    }

    #[test]
    fn floats_round_trip() {
        for x in [std::f64::consts::PI, 1e-300, -2.5e17, 0.0, 0.606530659712633] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let rows = [SweepRow::new("0.5", 1.0, 0.75), SweepRow::new("1+2i", f64::NAN, 0.0)];
        let s = to_csv(&rows);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "axis,measured,predicted,abs_error");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.5,1.0000000000000000e0,7.5000000000000000e-1,2.5"));
        assert!(lines[2].starts_with("1+2i,nan,"));
    }
}
