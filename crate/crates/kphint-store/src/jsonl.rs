//! Line-delimited JSON readers and writers.
//!
//! Readers skip blank lines and `{"kind":"header",...}` provenance records so
//! downstream files can be re-ingested verbatim. Malformed lines surface the
//! 1-based line number.

use crate::error::{StoreError, StoreResult};
use crate::schema::HeaderRecord;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

fn io_err(path: &Path, source: std::io::Error) -> StoreError {
    StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn is_header(value: &serde_json::Value) -> bool {
    value.get("kind").and_then(|k| k.as_str()) == Some("header")
}

/// Reads every non-header record in `path`, tagged with its line number.
pub fn read_records<T: DeserializeOwned>(path: &Path) -> StoreResult<Vec<(usize, T)>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| StoreError::Malformed {
                path: path.to_path_buf(),
                line: lineno,
                message: e.to_string(),
            })?;
        if is_header(&value) {
            continue;
        }
        let record: T = serde_json::from_value(value).map_err(|e| StoreError::Malformed {
            path: path.to_path_buf(),
            line: lineno,
            message: e.to_string(),
        })?;
        out.push((lineno, record));
    }
    Ok(out)
}

/// Writes `records` to `path`, one JSON object per line, optionally preceded
/// by a header record. Overwrites any existing file.
pub fn write_records<T: Serialize>(
    path: &Path,
    header: Option<&HeaderRecord>,
    records: impl IntoIterator<Item = T>,
) -> StoreResult<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut writer = BufWriter::new(file);
    if let Some(header) = header {
        write_line(path, &mut writer, header)?;
    }
    for record in records {
        write_line(path, &mut writer, &record)?;
    }
    writer.flush().map_err(|e| io_err(path, e))
}

fn write_line<T: Serialize>(path: &Path, writer: &mut impl Write, record: &T) -> StoreResult<()> {
    let json = serde_json::to_string(record).map_err(|e| StoreError::Malformed {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    writer
        .write_all(json.as_bytes())
        .and_then(|_| writer.write_all(b"\n"))
        .map_err(|e| io_err(path, e))
}

/// Serializes one record as a single JSONL line (with trailing newline).
pub fn to_line<T: Serialize>(record: &T) -> String {
    let mut line = serde_json::to_string(record).expect("record serialization cannot fail");
    line.push('\n');
    line
}
