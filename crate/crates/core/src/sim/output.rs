//! CSV and JSON emission of aggregated rows.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::ResultRow;
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 6] = [
    "sweep_value",
    "scheme",
    "mean_delay_s",
    "stderr_s",
    "mean_tno_fraction",
    "trials",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Writes rows as CSV with a header line and LF terminators.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    writer.write_record(CSV_COLUMNS).map_err(ser)?;
    for row in rows {
        writer.serialize(row).map_err(ser)?;
    }
    writer.flush().map_err(|e| Error::Serialization(e.to_string()))
}

/// Writes rows as a pretty-printed JSON array.
pub fn write_json<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows).map_err(|e| Error::Serialization(e.to_string()))?;
    out.write_all(b"\n").map_err(|e| Error::Serialization(e.to_string()))
}

/// Writes rows to `path`.
pub fn emit_results(rows: &[ResultRow], format: OutputFormat, path: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let file = File::create(path).map_err(io)?;
    let mut out = BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(rows, &mut out)?,
        OutputFormat::Json => write_json(rows, &mut out)?,
    }
    out.flush().map_err(io)
}

/// Parses rows written by [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<ResultRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Serialization(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ResultRow {
        ResultRow {
            sweep_value: Some(1e6),
            scheme: "timeshare".into(),
            mean_delay_s: 0.123456789,
            stderr_s: 0.001,
            mean_tno_fraction: 0.5,
            trials: 500,
        }
    }

    #[test]
    fn empty_rows_give_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "sweep_value,scheme,mean_delay_s,stderr_s,mean_tno_fraction,trials\n"
        );
    }

    #[test]
    fn one_row_gives_two_lines() {
        let mut buf = Vec::new();
        write_csv(&[row()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "1000000.0,timeshare,0.123456789,0.001,0.5,500");
        assert!(!text.contains('\r'));
        assert_eq!(read_csv(&text).unwrap(), vec![row()]);
    }

    #[test]
    fn missing_sweep_value_is_an_empty_field() {
        let mut r = row();
        r.sweep_value = None;
        let mut buf = Vec::new();
        write_csv(&[r.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with(",timeshare"));
        assert_eq!(read_csv(&text).unwrap(), vec![r]);
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.json");
        let mut other = row();
        other.sweep_value = None;
        other.mean_delay_s = 1.0 / 3.0;
        let rows = vec![row(), other];
        emit_results(&rows, OutputFormat::Json, &path).unwrap();
        let back: Vec<ResultRow> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("rows.csv");
        assert!(matches!(
            emit_results(&[], OutputFormat::Csv, &path),
            Err(Error::Io { .. })
        ));
    }
}
