//! Series files and result documents.
//!
//! Series are read from plain text (one value per line, `#` comments and
//! blank lines skipped) or single-column CSV with an optional header. They
//! are written as plain text using the shortest representation that
//! round-trips, with `.` as decimal point.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypothesis::{StatSummary, SweepResult};
use crate::series::TimeSeries;

/// Parses plain text or single-column CSV.
pub fn parse_series(text: &str) -> Result<TimeSeries> {
    let mut values = Vec::new();
    let mut seen_data = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = if line.contains(',') {
            let rec = csv::ReaderBuilder::new()
                .has_headers(false)
                .from_reader(line.as_bytes())
                .records()
                .next()
                .transpose()?
                .ok_or_else(|| Error::Parse {
                    line: i + 1,
                    reason: "empty record".into(),
                })?;
            let mut fields: Vec<&str> = rec.iter().map(str::trim).collect();
            while fields.len() > 1 && fields.last() == Some(&"") {
                fields.pop();
            }
            if fields.len() != 1 {
                return Err(Error::Parse {
                    line: i + 1,
                    reason: format!("expected a single column, found {}", fields.len()),
                });
            }
            fields[0].to_string()
        } else {
            line.to_string()
        };
        let field = field.trim_matches('"');
        match field.parse::<f64>() {
            Ok(v) => {
                values.push(v);
                seen_data = true;
            }
            // A non-numeric first record is a header.
            Err(_) if !seen_data && values.is_empty() => seen_data = true,
            Err(_) => {
                return Err(Error::Parse {
                    line: i + 1,
                    reason: format!("`{field}` is not a number"),
                })
            }
        }
    }
    TimeSeries::new(values)
}

pub fn read_series(path: impl AsRef<Path>) -> Result<TimeSeries> {
    parse_series(&std::fs::read_to_string(path)?)
}

/// Reads a series from any buffered reader.
pub fn read_series_from(reader: impl BufRead) -> Result<TimeSeries> {
    let mut text = String::new();
    for line in reader.lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    parse_series(&text)
}

pub fn write_series(mut w: impl Write, x: &TimeSeries) -> Result<()> {
    for v in x.as_slice() {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

pub fn series_to_string(x: &TimeSeries) -> String {
    let mut buf = Vec::new();
    write_series(&mut buf, x).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Header of the sweep table.
pub const SWEEP_CSV_HEADER: [&str; 8] = [
    "fc",
    "stat",
    "data_value",
    "p5",
    "p50",
    "p95",
    "reject",
    "linearity_preserved",
];

fn write_row(
    w: &mut csv::Writer<impl Write>,
    fc: usize,
    stat: &str,
    s: &StatSummary,
    linearity_preserved: bool,
) -> Result<()> {
    w.write_record([
        fc.to_string(),
        stat.to_string(),
        s.data_value.to_string(),
        s.band.p5.to_string(),
        s.band.p50.to_string(),
        s.band.p95.to_string(),
        s.reject.to_string(),
        linearity_preserved.to_string(),
    ])?;
    Ok(())
}

/// Tidy table: one row per cutoff for `AC` (lag 1), then one per cutoff for
/// the sweep statistic.
pub fn write_sweep_csv(w: impl Write, sweep: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(SWEEP_CSV_HEADER)?;
    for p in &sweep.points {
        write_row(&mut w, p.fc, "AC", &p.ac1, p.linearity_preserved)?;
    }
    let label = sweep.statistic.label();
    for p in &sweep.points {
        write_row(&mut w, p.fc, label, &p.statistic, p.linearity_preserved)?;
    }
    w.flush()?;
    Ok(())
}

/// Provenance attached to every result document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub library: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
}

impl RunMetadata {
    pub fn new(command: impl Into<String>, seed: u64, parameters: serde_json::Value) -> Self {
        Self {
            library: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            seed,
            parameters,
        }
    }
}

#[derive(Debug, Serialize)]
struct Document<'a, T: Serialize> {
    metadata: &'a RunMetadata,
    result: &'a T,
}

/// Pretty JSON `{ "metadata": .., "result": .. }` with a trailing newline.
pub fn write_json<T: Serialize>(mut w: impl Write, metadata: &RunMetadata, result: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &Document { metadata, result })?;
    writeln!(w)?;
    Ok(())
}
