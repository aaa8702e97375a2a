//! JSON and CSV interchange for step functions.
//!
//! JSON: `{"breakpoints": [x0, ..., xm], "values": [v1, ..., vm]}`.
//! CSV: one row per breakpoint, `breakpoint,value-of-following-cell`, with the
//! value left empty on the final row. An optional header row is skipped.

use std::path::Path;

use crate::error::{Error, Result};
use crate::stepfn::StepFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// Picks the format from a file extension; anything but `.csv` is JSON.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

pub fn from_json_str(s: &str) -> Result<StepFunction> {
    serde_json::from_str(s).map_err(|e| Error::Parse { line: Some(e.line()), message: e.to_string() })
}

pub fn to_json_string(f: &StepFunction) -> String {
    serde_json::to_string(f).expect("step functions always serialize")
}

pub fn from_csv_str(s: &str) -> Result<StepFunction> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(s.as_bytes());
    let mut bps = Vec::new();
    let mut vals = Vec::new();
    let mut ended = false;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let err = |message: String| Error::Parse { line: Some(line), message };
        let x = rec.get(0).unwrap_or("");
        let x: f64 = match x.parse() {
            Ok(x) => x,
            Err(_) if bps.is_empty() && vals.is_empty() && i == 0 => continue,
            Err(_) => return Err(err(format!("cannot parse breakpoint {x:?}"))),
        };
        if ended {
            return Err(err("row after the final breakpoint (which has an empty value)".into()));
        }
        if rec.len() > 2 {
            return Err(err(format!("expected at most 2 columns, found {}", rec.len())));
        }
        bps.push(x);
        match rec.get(1).unwrap_or("") {
            "" => ended = true,
            v => vals.push(v.parse::<f64>().map_err(|_| err(format!("cannot parse value {v:?}")))?),
        }
        if !ended && bps.len() != vals.len() {
            return Err(err("value count out of step with breakpoints".into()));
        }
    }
    if !bps.is_empty() && !ended {
        return Err(Error::Parse { line: None, message: "final row must have an empty value".into() });
    }
    StepFunction::new(bps, vals)
}

pub fn to_csv_string(f: &StepFunction) -> String {
    let mut out = String::from("breakpoint,value\n");
    for (i, b) in f.breakpoints().iter().enumerate() {
        match f.values().get(i) {
            Some(v) => out.push_str(&format!("{b},{v}\n")),
            None => out.push_str(&format!("{b},\n")),
        }
    }
    out
}

pub fn parse(s: &str, format: Format) -> Result<StepFunction> {
    match format {
        Format::Json => from_json_str(s),
        Format::Csv => from_csv_str(s),
    }
}

pub fn render(f: &StepFunction, format: Format) -> String {
    match format {
        Format::Json => to_json_string(f),
        Format::Csv => to_csv_string(f),
    }
}

/// Reads a step function, choosing the format by extension.
pub fn read_step_function(path: &Path) -> Result<StepFunction> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse { line: None, message: format!("{}: {e}", path.display()) })?;
    parse(&text, Format::from_path(path))
}
