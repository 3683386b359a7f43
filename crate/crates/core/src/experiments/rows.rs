use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column order of every result table.
pub const CSV_HEADER: &str = "protocol,N,K,L,t,tau,sample,realization,seed,qfi,qfi_ratio,entropy_bits,schmidt_rank";

/// Sample index carried by analytic-curve rows.
pub const ANALYTIC_SAMPLE: i64 = -1;
/// Realization indices of the per-grid-point aggregates.
pub const AGG_MEAN: i64 = -1;
pub const AGG_MIN: i64 = -2;
pub const AGG_MAX: i64 = -3;

/// One output record. Fields that do not apply to a protocol stay `None`
/// and are written as empty cells.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub protocol: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub t: Option<f64>,
    pub tau: Option<f64>,
    pub sample: Option<i64>,
    pub realization: Option<i64>,
    pub seed: Option<u64>,
    pub qfi: Option<f64>,
    pub qfi_ratio: Option<f64>,
    pub entropy_bits: Option<f64>,
    pub schmidt_rank: Option<usize>,
}

impl ResultRow {
    pub fn new(protocol: &str, n: usize) -> Self {
        Self { protocol: protocol.to_string(), n, ..Self::default() }
    }

    pub fn is_analytic(&self) -> bool {
        self.sample == Some(ANALYTIC_SAMPLE)
    }

    pub fn is_aggregate(&self) -> bool {
        matches!(self.realization, Some(r) if r < 0)
    }
}

pub fn write_rows_to<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).has_headers(false).from_writer(out);
    let io = |e: csv::Error| Error::Io { path: "<csv>".into(), source: std::io::Error::other(e) };
    w.write_record(CSV_HEADER.split(',')).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io { path: "<csv>".into(), source: e })?;
    Ok(())
}

/// Writes the table to `path` through a sibling temporary file that is
/// renamed into place only after everything was written.
pub fn write_rows(rows: &[ResultRow], path: &Path) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    write_rows_to(rows, tmp.as_file_mut())?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let io = |e: csv::Error| Error::Io { path: path.to_path_buf(), source: std::io::Error::other(e) };
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    r.deserialize().map(|row| row.map_err(io)).collect()
}
