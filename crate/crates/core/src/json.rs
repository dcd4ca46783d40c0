//! Canonical JSON rendering: compact, keys sorted, and objects whose keys are
//! all integers (sequence windows) sorted numerically instead of lexically.

use serde::Serialize;
use serde_json::{Map, Value};

pub fn to_canonical<T: Serialize + ?Sized>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("domain types always serialize");
    let mut out = String::new();
    write_value(&value, &mut out);
    out
}

pub fn value_to_canonical(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, &mut out);
    out
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => write_object(map, out),
        Value::Array(items) => {
            out.push('[');
            for (n, item) in items.iter().enumerate() {
                if n > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn write_object(map: &Map<String, Value>, out: &mut String) {
    let mut keys: Vec<&String> = map.keys().collect();
    let numeric: Option<Vec<i64>> = keys.iter().map(|k| k.parse::<i64>().ok()).collect();
    match numeric {
        Some(_) if !keys.is_empty() => keys.sort_by_key(|k| k.parse::<i64>().unwrap()),
        _ => keys.sort(),
    }
    out.push('{');
    for (n, key) in keys.into_iter().enumerate() {
        if n > 0 {
            out.push(',');
        }
        out.push_str(&Value::String(key.clone()).to_string());
        out.push(':');
        write_value(&map[key], out);
    }
    out.push('}');
}
