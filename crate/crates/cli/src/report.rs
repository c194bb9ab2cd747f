//! Report envelope and rendering.

use std::io::Write;

use serde_json::{json, Value};

use crate::config::{Format, RunConfig};

pub fn envelope(command: &str, cfg: &RunConfig, args: Value, result: Value, status: &str) -> Value {
    let mut v = json!({
        "tool": "ncsym",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": cfg,
        "args": args,
        "status": status,
        "result": result,
    });
    if !cfg.no_timestamp {
        v["timestamp"] = Value::String(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    }
    v
}

/// Scalar leaves as `(dotted.path, value)` in key order.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(&key(k), x, out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(&key(&i.to_string()), x, out)),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("reports serialize") + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"]).expect("in-memory write");
            for (k, x) in flatten(v) {
                w.write_record([k, x]).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 records")
        }
    }
}

/// Prints the report and appends it to `--out` when given.
pub fn emit(v: &Value, cfg: &RunConfig) -> std::io::Result<()> {
    let text = render(v, cfg.format);
    std::io::stdout().write_all(text.as_bytes())?;
    if let Some(path) = &cfg.out {
        let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        match cfg.format {
            Format::Json => writeln!(f, "{}", serde_json::to_string(v).expect("reports serialize"))?,
            Format::Csv => f.write_all(text.as_bytes())?,
        }
    }
    Ok(())
}
