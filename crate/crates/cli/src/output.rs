//! Output files: a `#` comment header followed by CSV, or a JSON object with
//! a `header` member.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const UNITS_LINE: &str =
    "natural units: k_B = hbar = T = 1; energies and fields in k_B T, times in hbar/(k_B T), powers in (k_B T)^2/hbar";

pub struct Header {
    pub command: String,
    pub config: String,
}

impl Header {
    fn lines(&self, columns: &str) -> Vec<String> {
        let mut out = vec![
            format!("adiacycle {} ({})", env!("CARGO_PKG_VERSION"), self.command),
            UNITS_LINE.to_string(),
            format!("columns: {columns}"),
            "config:".to_string(),
        ];
        out.extend(self.config.lines().map(|l| format!("  {l}")));
        out
    }

    fn json(&self) -> serde_json::Value {
        serde_json::json!({
            "tool": format!("adiacycle {}", env!("CARGO_PKG_VERSION")),
            "command": self.command,
            "units": UNITS_LINE,
            "config": self.config,
        })
    }
}

/// Locale-independent decimal text with 12 significant digits.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        // Adding zero folds -0 into 0.
        format!("{:.11e}", v + 0.0)
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "inf".into())
}

pub struct Table {
    pub columns: Vec<&'static str>,
    /// What the columns mean on the figure's axes.
    pub readme: String,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str], readme: impl Into<String>) -> Self {
        Self { columns: columns.to_vec(), readme: readme.into(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path, header: &Header) -> Result<(), CliError> {
        let mut f = BufWriter::new(File::create(path)?);
        for l in header.lines(&self.readme) {
            writeln!(f, "{}", format!("# {l}").trim_end())?;
        }
        let mut w = csv::Writer::from_writer(f);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn write_json<T: Serialize>(path: &Path, header: &Header, body: &T) -> Result<String, CliError> {
    let mut v = serde_json::to_value(body)?;
    let obj = match v.as_object_mut() {
        Some(o) => o,
        None => return Err(CliError::Config("JSON body must be an object".into())),
    };
    let mut out = serde_json::Map::new();
    out.insert("header".into(), header.json());
    out.append(obj);
    let text = serde_json::to_string_pretty(&serde_json::Value::Object(out))?;
    std::fs::write(path, format!("{text}\n"))?;
    Ok(text)
}

pub fn out_path(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}
