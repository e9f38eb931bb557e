//! JSON and TSV rendering.

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Tsv,
}

pub fn render<T: Serialize>(value: &T, format: Format) -> String {
    let v = serde_json::to_value(value).expect("reports serialize");
    match format {
        Format::Json => serde_json::to_string_pretty(&v).expect("values serialize"),
        Format::Tsv => tsv(&v),
    }
}

pub fn error_value(name: &str, message: &str, exit_code: i32) -> Value {
    json!({"error": {"name": name, "message": message, "exit_code": exit_code}})
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(xs) => xs.iter().map(scalar).collect::<Option<Vec<_>>>().map(|xs| xs.join(",")),
        Value::Object(_) => None,
    }
}

fn cell(v: &Value) -> String {
    scalar(v).unwrap_or_else(|| v.to_string())
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(xs) if scalar(v).is_none() => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        _ => out.push((prefix.to_string(), cell(v))),
    }
}

/// Arrays of records become a table with a header row; anything else becomes `key<TAB>value`
/// lines with dotted paths.
pub fn tsv(v: &Value) -> String {
    let mut lines = Vec::new();
    match v {
        Value::Array(rows) if !rows.is_empty() && rows.iter().all(Value::is_object) => {
            let header: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
            lines.push(header.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\t"));
            for r in rows {
                let r = r.as_object().unwrap();
                lines.push(header.iter().map(|k| r.get(*k).map(cell).unwrap_or_default()).collect::<Vec<_>>().join("\t"));
            }
        }
        _ => {
            let mut out = Vec::new();
            flatten("", v, &mut out);
            lines.extend(out.into_iter().map(|(k, v)| format!("{k}\t{v}")));
        }
    }
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_and_records() {
        let rows = json!([{"text": "t^[1,0]", "length": 1, "translation": [1, 0]}]);
        assert_eq!(tsv(&rows), "text\tlength\ttranslation\nt^[1,0]\t1\t1,0");
        let rec = json!({"d": -1, "counts": {"e": 2}, "rows": [{"w": [1]}]});
        assert_eq!(tsv(&rec), "d\t-1\ncounts.e\t2\nrows.0.w\t1");
    }
}
