//! Deterministic JSON rendering for run reports.
//!
//! Reports must be byte-identical across runs with the same inputs, so the
//! renderer avoids anything locale- or pointer-dependent: object keys are
//! sorted (serde_json's default BTreeMap), and every floating-point number is
//! printed with exactly 17 significant digits in scientific notation.
//! Non-finite values cannot appear in JSON numbers; they are emitted as the
//! strings "inf", "-inf", "nan" so that divergence verdicts survive the trip
//! through the report.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u64 = 1;

/// One CLI run: everything except wall time, which goes to stderr so the
/// report itself stays reproducible.
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Value,
    pub flags: Vec<String>,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.flags.iter().any(|f| f.starts_with("error"))
    }

    pub fn render(&self) -> String {
        let v = serde_json::json!({
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "flags": self.flags,
        });
        let mut out = String::new();
        write_value(&mut out, &v, 0);
        out.push('\n');
        out
    }
}

/// Serialize any value, mapping non-finite floats to marker strings instead
/// of serde_json's silent null.
pub fn to_clean_value<T: Serialize>(t: &T) -> Value {
    let v = serde_json::to_value(t).unwrap_or(Value::Null);
    clean(v)
}

fn clean(v: Value) -> Value {
    match v {
        Value::Array(a) => Value::Array(a.into_iter().map(clean).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, x)| (k, clean(x))).collect()),
        other => other,
    }
}

/// A float as a report value: finite numbers stay numbers, non-finite become
/// marker strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// 17 significant digits, scientific notation: enough to round-trip any f64,
/// and a fixed width so reports are byte-stable.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                // serde_json refuses non-finite numbers, so as_f64 is Some.
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string escaping cannot fail"))
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                write_value(out, item, indent + 1);
            }
            newline(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, val)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                out.push_str(&serde_json::to_string(k).expect("string escaping cannot fail"));
                out.push_str(": ");
                write_value(out, val, indent + 1);
            }
            newline(out, indent);
            out.push('}');
        }
    }
}

fn newline(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}
