use idemconc::Error;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::{self, Write};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// Upper bound on rows written to a sample file.
pub const MAX_SAMPLE_ROWS: u64 = 10_000_000;

/// The versioned envelope around every command result.
pub fn envelope<T: Serialize>(command: &str, result: &T) -> serde_json::Result<Value> {
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "generator": concat!("idemconc ", env!("CARGO_PKG_VERSION")),
        "result": serde_json::to_value(result)?,
    }))
}

pub fn error_object(e: &Error) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "error": {
            "code": e.code(),
            "message": e.to_string(),
        }
    })
}

pub fn write_json(value: &Value, out: Option<&Path>) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

/// Seventeen significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(header: &[&str], rows: &[Vec<String>], out: Option<&Path>) -> io::Result<()> {
    let mut buf = header.join(",");
    buf.push('\n');
    for row in rows {
        buf.push_str(&row.join(","));
        buf.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, buf),
        None => io::stdout().write_all(buf.as_bytes()),
    }
}

#[derive(Debug, Serialize)]
pub struct SampleFile {
    pub path: String,
    pub rows: u64,
    pub truncated: bool,
}

/// Writes `(x, value(x))` on a uniform grid of `[0, 1)`.
pub fn write_samples<F: Fn(f64) -> f64>(path: &Path, requested: u64, f: F) -> io::Result<SampleFile> {
    let rows = requested.min(MAX_SAMPLE_ROWS);
    let file = std::fs::File::create(path)?;
    let mut w = io::BufWriter::new(file);
    writeln!(w, "x,value")?;
    for i in 0..rows {
        let x = i as f64 / rows as f64;
        writeln!(w, "{},{}", float(x), float(f(x)))?;
    }
    w.flush()?;
    Ok(SampleFile {
        path: path.display().to_string(),
        rows,
        truncated: rows < requested,
    })
}
