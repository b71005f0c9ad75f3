use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Format, Run};

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

pub struct Metadata {
    pub model: String,
    pub params: Value,
    pub grid: Value,
    pub units: String,
    pub results: Value,
}

impl Metadata {
    pub fn to_json(&self, run: &Run) -> Value {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        json!({
            "model": self.model,
            "params": self.params,
            "grid": self.grid,
            "units": self.units,
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp": timestamp,
            "results": self.results,
            "run": run,
        })
    }
}

fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(contents.as_bytes())
}

/// Writes `stem.csv` plus `stem.json` metadata, or a single `stem.json`
/// carrying both. Returns the paths written.
pub fn write_dataset(dir: &Path, stem: &str, table: &Table, meta: &Metadata, run: &Run) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut meta_json = meta.to_json(run);
    let json_path = dir.join(format!("{stem}.json"));
    match run.format {
        Format::Csv => {
            let csv_path = dir.join(format!("{stem}.csv"));
            write_file(&csv_path, &table.to_csv())?;
            write_file(&json_path, &pretty(&meta_json))?;
            Ok(vec![csv_path, json_path])
        }
        Format::Json => {
            meta_json["data"] = serde_json::to_value(table).expect("table serializes");
            write_file(&json_path, &pretty(&meta_json))?;
            Ok(vec![json_path])
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}
