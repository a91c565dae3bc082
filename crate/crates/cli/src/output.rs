use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::Usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Round to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Serialize and round every float in the tree to 12 significant digits.
pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    let mut v = serde_json::to_value(v)?;
    round_tree(&mut v);
    Ok(v)
}

fn round_tree(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round12(x))) {
                *n = x;
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_tree),
        Value::Object(m) => m.values_mut().for_each(round_tree),
        _ => {}
    }
}

/// Build an ordered JSON object.
pub fn object<const N: usize>(fields: [(&str, Value); N]) -> Value {
    let mut m = Map::new();
    for (k, v) in fields {
        m.insert(k.to_string(), v);
    }
    let mut v = Value::Object(m);
    round_tree(&mut v);
    v
}

fn scalar(v: &Value) -> Result<String> {
    Ok(match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(Usage("csv output needs flat records".into()).into()),
    })
}

/// Header from the first record's keys, one line per record.
pub fn csv_bytes(records: &[Value]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let Some(Value::Object(first)) = records.first() else {
        return Err(Usage("nothing to write".into()).into());
    };
    w.write_record(first.keys())?;
    for r in records {
        let Value::Object(m) = r else {
            return Err(Usage("csv output needs flat records".into()).into());
        };
        let row = m.values().map(scalar).collect::<Result<Vec<_>>>()?;
        w.write_record(row)?;
    }
    Ok(w.into_inner().context("flushing csv")?)
}

pub fn json_bytes(v: &Value) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

/// Primary output: the file at `out`, or stdout.
pub fn emit(out: Option<&Path>, bytes: &[u8], summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
            println!("{summary} -> {}", path.display());
        }
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}
