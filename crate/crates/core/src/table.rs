//! Deterministic CSV tables with a provenance comment line.

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Column names plus rectangular numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Contents of the leading comment line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableHeader {
    pub config_hash: String,
    pub seed: u64,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    fn check_shape(&self) -> Result<()> {
        match self.rows.iter().position(|r| r.len() != self.columns.len()) {
            Some(i) => Err(Error::InvalidArgument(format!(
                "row {i} has {} entries, expected {}",
                self.rows[i].len(),
                self.columns.len()
            ))),
            None => Ok(()),
        }
    }
}

/// Hex SHA-256 of a canonical configuration string.
pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// 17 significant digits; parses back to the same `f64`.
pub fn format_value(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Renders the table: comment line, header row, data rows, LF endings.
pub fn render_table(table: &Table, header: &TableHeader) -> Result<Vec<u8>> {
    table.check_shape()?;
    let mut out = Vec::new();
    writeln!(out, "# config_sha256={} seed={}", header.config_hash, header.seed)?;
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        w.write_record(&table.columns).map_err(csv_error)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|&x| format_value(x)))
                .map_err(csv_error)?;
        }
        w.flush()?;
    }
    Ok(out)
}

pub fn emit_table(table: &Table, header: &TableHeader, path: &Path) -> Result<()> {
    let bytes = render_table(table, header)?;
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Inverse of [`render_table`].
pub fn parse_table(text: &str) -> Result<(TableHeader, Table)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let header = parse_comment(first)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(rest.as_bytes());
    let columns: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(String::from)
        .collect();
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Config(format!("line {}: `{f}` is not a number", i + 3)))
            })
            .collect::<Result<Vec<f64>>>()?;
        table.rows.push(row);
    }
    Ok((header, table))
}

fn parse_comment(line: &str) -> Result<TableHeader> {
    let body = line
        .strip_prefix("# ")
        .ok_or_else(|| Error::Config("line 1: missing comment header".into()))?;
    let mut hash = None;
    let mut seed = None;
    for field in body.split_whitespace() {
        match field.split_once('=') {
            Some(("config_sha256", v)) => hash = Some(v.to_string()),
            Some(("seed", v)) => {
                seed = Some(
                    v.parse()
                        .map_err(|_| Error::Config(format!("line 1: bad seed `{v}`")))?,
                )
            }
            _ => {}
        }
    }
    match (hash, seed) {
        (Some(config_hash), Some(seed)) => Ok(TableHeader { config_hash, seed }),
        _ => Err(Error::Config("line 1: comment header lacks hash or seed".into())),
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
