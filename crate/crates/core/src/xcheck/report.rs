use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::xcheck::experiments::RatioTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<ReportFormat> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::config(format!("unknown report format '{other}'"))),
        }
    }
}

/// CSV rendering with the exact column header `R,lhs,rhs,ratio`. Floats use
/// the shortest round-trip representation, so reruns are byte-stable.
pub fn to_csv_string(table: &RatioTable) -> String {
    let mut out = String::from("R,lhs,rhs,ratio\n");
    for row in &table.rows {
        out.push_str(&format!("{},{},{},{}\n", row.r, row.lhs, row.rhs, row.ratio));
    }
    out
}

/// JSON rendering mirroring the CSV with a metadata block.
pub fn to_json_string(table: &RatioTable) -> Result<String> {
    serde_json::to_string_pretty(table).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_json(text: &str) -> Result<RatioTable> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Writes a table to a file in the requested format.
pub fn emit_report(table: &RatioTable, format: ReportFormat, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    match format {
        ReportFormat::Csv => file.write_all(to_csv_string(table).as_bytes())?,
        ReportFormat::Json => file.write_all(to_json_string(table)?.as_bytes())?,
    }
    Ok(())
}
