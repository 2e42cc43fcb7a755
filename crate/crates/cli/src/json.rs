//! JSON text with a fixed layout: two-space indent, keys in map order,
//! floats in scientific notation with 17 significant digits.

use serde_json::Value;

/// `x` with 17 significant digits, e.g. `1.8000000000000000e0`.
pub fn format_float(x: f64) -> String {
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
                out.push_str(&format_float(n.as_f64().expect("finite number")));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string encodes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key encodes"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Serializes `v` with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn layout() {
        let v = json!({"b": [1, 2.5], "a": {"x": null, "y": "q\""}, "c": []});
        let t = to_text(&v);
        assert_eq!(
            t,
            "{\n  \"a\": {\n    \"x\": null,\n    \"y\": \"q\\\"\"\n  },\n  \"b\": [\n    1,\n    2.5000000000000000e0\n  ],\n  \"c\": []\n}\n"
        );
        let back: Value = serde_json::from_str(&t).unwrap();
        assert_eq!(back, v);
    }

    proptest! {
        #[test]
        fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let s = format_float(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
            let v: Value = serde_json::from_str(&to_text(&json!({"x": x}))).unwrap();
            prop_assert_eq!(v["x"].as_f64().unwrap(), x);
        }
    }
}
