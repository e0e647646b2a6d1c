//! Result rows and their CSV / JSON encodings.

use serde::{Deserialize, Serialize};
use std::io::{self, Write};

pub const CSV_HEADER: [&str; 6] = ["axis", "value", "sop", "method", "std_err", "meta"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub axis: String,
    pub value: f64,
    /// Missing when the evaluation failed; `meta` then holds the error.
    pub sop: Option<f64>,
    pub method: String,
    pub std_err: Option<f64>,
    pub meta: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Floats use Rust's shortest round-trip formatting.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.axis.clone(),
            r.value.to_string(),
            opt(r.sop),
            r.method.clone(),
            opt(r.std_err),
            r.meta.clone(),
        ])?;
    }
    w.flush()
}

pub fn write_json<W: Write>(rows: &[Row], mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}

pub fn write(rows: &[Row], format: Format, out: impl Write) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
    }
}

/// Parses CSV produced by `write_csv`.
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<Row>, String> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    if header != CSV_HEADER {
        return Err(format!("unexpected header {header:?}"));
    }
    let float = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    let maybe = |s: &str| if s.is_empty() { Ok(None) } else { float(s).map(Some) };
    rd.records()
        .map(|rec| {
            let rec = rec.map_err(|e| e.to_string())?;
            Ok(Row {
                axis: rec[0].to_string(),
                value: float(&rec[1])?,
                sop: maybe(&rec[2])?,
                method: rec[3].to_string(),
                std_err: maybe(&rec[4])?,
                meta: rec[5].to_string(),
            })
        })
        .collect()
}
