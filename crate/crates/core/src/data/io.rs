//! Dataset files.
//!
//! * `csv-single`: one series per file, header `dim0,dim1,…`, one row per
//!   point. The entry id is the file stem.
//! * `jsonl-collection`: one entry per line,
//!   `{"id": "...", "label": "..." | null, "points": [[x, y, …], …]}`.
//!
//! Coordinates are written in the shortest decimal form that parses back to
//! the identical value, so a save/load round trip is bit-exact.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    CsvSingle,
    JsonlCollection,
}

impl Format {
    /// Guesses the format from the file extension (`.csv` or `.jsonl`/`.json`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::CsvSingle),
            "jsonl" | "json" | "ndjson" => Some(Format::JsonlCollection),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Format::CsvSingle => "csv-single",
            Format::JsonlCollection => "jsonl-collection",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv-single" => Ok(Format::CsvSingle),
            "jsonl-collection" => Ok(Format::JsonlCollection),
            other => Err(Error::InvalidInput(format!("unknown dataset format `{other}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonEntry {
    id: String,
    label: Option<String>,
    points: Vec<Vec<f64>>,
}

pub fn load_dataset<T: Scalar>(path: impl AsRef<Path>, format: Format) -> Result<Dataset<T>> {
    let path = path.as_ref();
    match format {
        Format::CsvSingle => load_csv(path),
        Format::JsonlCollection => load_jsonl(path),
    }
}

pub fn save_dataset<T: Scalar>(dataset: &Dataset<T>, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    match format {
        Format::CsvSingle => save_csv(dataset, path),
        Format::JsonlCollection => save_jsonl(dataset, path),
    }
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn load_csv<T: Scalar>(path: &Path) -> Result<Dataset<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let mut dataset = Dataset::new();
    if headers.is_empty() {
        return Ok(dataset);
    }
    for (j, h) in headers.iter().enumerate() {
        if h != format!("dim{j}") {
            return Err(parse_error(path, 1, format!("expected header `dim{j}`, found `{h}`")));
        }
    }
    let dim = headers.len();

    let mut data = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != dim {
            return Err(parse_error(
                path,
                line,
                format!("expected {dim} values, found {}", record.len()),
            ));
        }
        for field in record.iter() {
            let x: T = field
                .parse()
                .map_err(|e| parse_error(path, line, format!("bad number `{field}`: {e}")))?;
            data.push(x);
        }
    }
    if data.is_empty() {
        return Ok(dataset);
    }
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("series")
        .to_string();
    dataset.push_series(id, None, TimeSeries::from_flat(data, dim)?)?;
    Ok(dataset)
}

fn save_csv<T: Scalar>(dataset: &Dataset<T>, path: &Path) -> Result<()> {
    let [entry] = dataset.entries() else {
        return Err(Error::InvalidInput(format!(
            "csv-single holds exactly one series, dataset has {}",
            dataset.len()
        )));
    };
    let series = &entry.series;
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record((0..series.dim()).map(|j| format!("dim{j}")))?;
    for p in series.points() {
        writer.write_record(p.iter().map(|x| x.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

fn load_jsonl<T: Scalar>(path: &Path) -> Result<Dataset<T>> {
    let reader = BufReader::new(File::open(path)?);
    let mut dataset = Dataset::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let number = idx as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let entry: JsonEntry =
            serde_json::from_str(&line).map_err(|e| parse_error(path, number, e.to_string()))?;
        let points = entry
            .points
            .into_iter()
            .map(|p| p.into_iter().map(T::lit).collect())
            .collect();
        let series = TimeSeries::new(points).map_err(|e| parse_error(path, number, e.to_string()))?;
        dataset
            .push_series(entry.id, entry.label, series)
            .map_err(|e| parse_error(path, number, e.to_string()))?;
    }
    Ok(dataset)
}

fn save_jsonl<T: Scalar>(dataset: &Dataset<T>, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for entry in dataset.iter() {
        if entry.series.as_flat().iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "entry `{}` has non-finite coordinates",
                entry.id
            )));
        }
        let json = JsonEntry {
            id: entry.id.clone(),
            label: entry.label.clone(),
            points: entry
                .series
                .points()
                .map(|p| p.iter().map(|x| x.as_f64()).collect())
                .collect(),
        };
        serde_json::to_writer(&mut out, &json)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
