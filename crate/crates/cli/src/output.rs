//! Fixed-precision number formatting and the CSV/JSON writers.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::{Map, Number, Value};

use crate::failure::{Failure, Kind};

/// Formats `x` with `precision` decimals; `-0.000` prints as `0.000`.
pub fn fixed(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{x:.precision$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

/// Builds JSON values whose numbers keep their fixed-precision text.
#[derive(Clone, Copy)]
pub struct Json {
    pub precision: usize,
}

impl Json {
    pub fn num(&self, x: f64) -> Value {
        let text = fixed(x, self.precision);
        match serde_json::from_str::<Number>(&text) {
            Ok(n) => Value::Number(n),
            Err(_) => Value::String(text),
        }
    }

    pub fn nums(&self, xs: &[f64]) -> Value {
        Value::Array(xs.iter().map(|&x| self.num(x)).collect())
    }

    pub fn opt(&self, x: Option<f64>) -> Value {
        x.map_or(Value::Null, |x| self.num(x))
    }
}

/// Output directory plus precision; every write goes through here so I/O
/// failures map to one exit code.
pub struct Sink {
    pub dir: PathBuf,
    pub precision: usize,
}

impl Sink {
    pub fn new(dir: PathBuf, precision: usize) -> Result<Self> {
        fs::create_dir_all(&dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))
            .map_err(|e| Failure::new(Kind::Io, e))?;
        Ok(Self { dir, precision })
    }

    pub fn json(&self) -> Json {
        Json {
            precision: self.precision,
        }
    }

    pub fn fixed(&self, x: f64) -> String {
        fixed(x, self.precision)
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(|e| Failure::new(Kind::Io, e))?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    pub fn write_json(&self, name: &str, value: &Value) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// `#`-prefixed metadata lines, then the header, then the rows.
    pub fn write_csv(
        &self,
        name: &str,
        meta: &[(&str, String)],
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf> {
        let mut text = String::new();
        for (key, value) in meta {
            writeln!(text, "# {key}={value}")?;
        }
        writeln!(text, "{}", header.join(","))?;
        for row in rows {
            writeln!(text, "{}", row.join(","))?;
        }
        self.write(name, &text)
    }

    /// Writes a summary as `<stem>.json`, or as a flattened `key,value` CSV.
    pub fn write_summary(&self, stem: &str, value: &Value, format: Format) -> Result<PathBuf> {
        match format {
            Format::Json => self.write_json(&format!("{stem}.json"), value),
            Format::Csv => {
                let mut rows = Vec::new();
                flatten("", value, &mut rows);
                let rows: Vec<Vec<String>> = rows.into_iter().map(|(k, v)| vec![k, v]).collect();
                self.write_csv(&format!("{stem}.csv"), &[], &["key", "value"], &rows)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Dotted-path rows, e.g. `contexts.0.e`. Object keys keep insertion order.
pub fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), csv_field(s))),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `serde_json::Map` built in call order.
pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}
