//! Bit-stable report rendering: JSON with sorted keys and `%.12g` floats, a flat CSV
//! summary and gnuplot data blocks.

use std::fmt::Write;

use serde::Serialize;
use serde_value::Value;

use crate::error::{Error, Result};

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_value::to_value(v).map_err(|e| Error::invalid(format!("cannot serialize report: {e}")))
}

/// `%.12g` as in C, with `inf`, `-inf` and `nan` spelled out.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    const P: i32 = 12;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if exp < -4 || exp >= P {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn number(v: &Value) -> Option<String> {
    Some(match v {
        Value::U8(x) => x.to_string(),
        Value::U16(x) => x.to_string(),
        Value::U32(x) => x.to_string(),
        Value::U64(x) => x.to_string(),
        Value::I8(x) => x.to_string(),
        Value::I16(x) => x.to_string(),
        Value::I32(x) => x.to_string(),
        Value::I64(x) => x.to_string(),
        Value::F32(x) => fmt_g(*x as f64),
        Value::F64(x) => fmt_g(*x),
        _ => return None,
    })
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::F64(x) => Some(*x),
        Value::F32(x) => Some(*x as f64),
        Value::U64(x) => Some(*x as f64),
        Value::I64(x) => Some(*x as f64),
        Value::U32(x) => Some(*x as f64),
        Value::I32(x) => Some(*x as f64),
        Value::Option(Some(b)) | Value::Newtype(b) => as_f64(b),
        _ => None,
    }
}

fn key_of(k: &Value) -> String {
    match k {
        Value::String(s) => s.clone(),
        Value::Char(c) => c.to_string(),
        other => number(other).unwrap_or_else(|| format!("{other:?}")),
    }
}

fn write_json(v: &Value, out: &mut String, indent: usize) {
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::F32(_) | Value::F64(_) => {
            let x = as_f64(v).unwrap_or(f64::NAN);
            if x.is_finite() {
                out.push_str(&fmt_g(x));
            } else {
                let _ = write!(out, "\"{}\"", fmt_g(x));
            }
        }
        Value::Char(c) => out.push_str(&serde_json::to_string(&c.to_string()).unwrap_or_default()),
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap_or_default()),
        Value::Unit | Value::Option(None) => out.push_str("null"),
        Value::Option(Some(b)) | Value::Newtype(b) => write_json(b, out, indent),
        Value::Seq(items) => {
            if items.iter().all(|i| number(i).is_some()) {
                out.push('[');
                for (k, i) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_json(i, out, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, i) in items.iter().enumerate() {
                out.push_str(&pad);
                write_json(i, out, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Map(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut entries: Vec<(String, &Value)> = m.iter().map(|(k, v)| (key_of(k), v)).collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            out.push_str("{\n");
            for (k, (key, val)) in entries.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(key).unwrap_or_default());
                out.push_str(": ");
                write_json(val, out, indent + 1);
                out.push_str(if k + 1 < entries.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        Value::Bytes(b) => out.push_str(&serde_json::to_string(b).unwrap_or_default()),
        other => out.push_str(&number(other).unwrap_or_default()),
    }
}

/// Pretty JSON with sorted keys; non-finite floats become the strings `"inf"`, `"-inf"`, `"nan"`.
pub fn json(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, &mut out, 0);
    out.push('\n');
    out
}

fn flatten(v: &Value, path: &str, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Map(m) => {
            for (k, val) in m {
                flatten(val, &join(&key_of(k)), rows);
            }
        }
        Value::Seq(items) => {
            for (i, val) in items.iter().enumerate() {
                flatten(val, &join(&i.to_string()), rows);
            }
        }
        Value::Option(Some(b)) | Value::Newtype(b) => flatten(b, path, rows),
        Value::Option(None) | Value::Unit => rows.push((path.to_string(), String::new())),
        Value::Bool(b) => rows.push((path.to_string(), b.to_string())),
        Value::String(s) => rows.push((path.to_string(), s.clone())),
        Value::Char(c) => rows.push((path.to_string(), c.to_string())),
        other => rows.push((path.to_string(), number(other).unwrap_or_default())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `path,value` rows for every scalar leaf, sorted by path.
pub fn csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten(v, "", &mut rows);
    rows.sort();
    let mut out = String::from("path,value\n");
    for (p, val) in rows {
        let _ = writeln!(out, "{},{}", csv_field(&p), csv_field(&val));
    }
    out
}

fn collect_point_lists(v: &Value, path: &str, out: &mut Vec<(String, Vec<Vec<f64>>)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Map(m) => {
            let mut entries: Vec<(String, &Value)> = m.iter().map(|(k, v)| (key_of(k), v)).collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            for (k, val) in entries {
                collect_point_lists(val, &join(&k), out);
            }
        }
        Value::Option(Some(b)) | Value::Newtype(b) => collect_point_lists(b, path, out),
        Value::Seq(items) if !items.is_empty() => {
            let rows: Option<Vec<Vec<f64>>> = items
                .iter()
                .map(|i| match i {
                    Value::Seq(xs) if !xs.is_empty() => xs.iter().map(as_f64).collect(),
                    _ => None,
                })
                .collect();
            match rows {
                Some(r) => out.push((path.to_string(), r)),
                None => {
                    for (i, val) in items.iter().enumerate() {
                        collect_point_lists(val, &join(&i.to_string()), out);
                    }
                }
            }
        }
        _ => {}
    }
}

/// One gnuplot data block per list of points in the report, separated by blank lines.
pub fn plot(v: &Value) -> String {
    let mut blocks = Vec::new();
    collect_point_lists(v, "", &mut blocks);
    let mut out = String::new();
    for (name, rows) in blocks {
        let _ = writeln!(out, "# {name}");
        for r in rows {
            let cols: Vec<String> = r.iter().map(|x| fmt_g(*x)).collect();
            let _ = writeln!(out, "{}", cols.join(" "));
        }
        out.push_str("\n\n");
    }
    out
}
