//! Plain-text form of a report: one `path: value` line per leaf of the JSON tree.
//! Multi-line strings continue on following lines indented with `  | `; strings that
//! would read back as another JSON value are written quoted.

use serde_json::Value;

/// Leaves of a JSON value keyed by dotted path; scalar arrays stay whole.
pub fn flatten(v: &Value) -> Vec<(String, Value)> {
    let mut out = Vec::new();
    walk(v, String::new(), &mut out);
    out
}

fn is_leaf_array(items: &[Value]) -> bool {
    items.iter().all(|x| !x.is_object() && !(x.is_array() && x.as_array().unwrap().iter().any(Value::is_object)))
}

fn walk(v: &Value, path: String, out: &mut Vec<(String, Value)>) {
    let child = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                walk(x, child(k), out);
            }
        }
        Value::Array(items) if !items.is_empty() && !is_leaf_array(items) => {
            for (i, x) in items.iter().enumerate() {
                walk(x, child(&i.to_string()), out);
            }
        }
        leaf => out.push((path, leaf.clone())),
    }
}

pub fn render_text(v: &Value) -> String {
    let mut s = String::new();
    for (path, leaf) in flatten(v) {
        match &leaf {
            Value::String(text) if serde_json::from_str::<Value>(text).is_ok() => {
                s.push_str(&format!("{path}: {leaf}\n"));
            }
            Value::String(text) => {
                let mut lines = text.split('\n');
                s.push_str(&format!("{path}: {}\n", lines.next().unwrap_or("")));
                for l in lines {
                    s.push_str(&format!("  | {l}\n"));
                }
            }
            other => s.push_str(&format!("{path}: {other}\n")),
        }
    }
    s
}

/// Inverse of [`render_text`]; string leaves come back as strings, everything else as JSON.
pub fn parse_text(s: &str) -> Vec<(String, Value)> {
    let mut out: Vec<(String, Value)> = Vec::new();
    let mut pending: Option<(String, String)> = None;
    let finish = |p: Option<(String, String)>, out: &mut Vec<(String, Value)>| {
        if let Some((path, raw)) = p {
            let v = Some(&raw)
                .filter(|r| !r.contains('\n'))
                .and_then(|r| serde_json::from_str::<Value>(r).ok())
                .unwrap_or(Value::String(raw));
            out.push((path, v));
        }
    };
    for line in s.lines() {
        if let Some(rest) = line.strip_prefix("  | ") {
            if let Some((_, raw)) = pending.as_mut() {
                raw.push('\n');
                raw.push_str(rest);
            }
            continue;
        }
        finish(pending.take(), &mut out);
        if let Some((path, raw)) = line.split_once(": ") {
            pending = Some((path.to_string(), raw.to_string()));
        } else if let Some(path) = line.strip_suffix(':') {
            pending = Some((path.to_string(), String::new()));
        }
    }
    finish(pending, &mut out);
    out
}
