//! Deterministic JSON rendering.
//!
//! `serde_json`'s default float printing uses shortest-round-trip notation,
//! whose width varies from value to value.  Reports instead print every float
//! with 17 significant digits in scientific notation, which round-trips
//! exactly and keeps output byte-stable across runs.  Object keys come out in
//! sorted order because `serde_json::Value` stores maps as `BTreeMap`.

use serde_json::Value;

/// Renders `value` as compact JSON with a trailing newline.
pub fn render(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, &mut out);
    out.push('\n');
    out
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("checked is_f64");
                // Flush -0.0 to 0.0 so sign noise from the numerics never
                // reaches the output.
                let x = if x == 0.0 { 0.0 } else { x };
                out.push_str(&format!("{x:.16e}"));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => write_string(s, out),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_string(key, out);
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

fn write_string(s: &str, out: &mut String) {
    out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
}
