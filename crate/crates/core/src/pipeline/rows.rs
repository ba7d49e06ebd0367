use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::bounds::normalized;
use crate::error::{Error, Result};
use crate::ntheory::is_prime;
use crate::ratio::RatioRecord;

/// Column names, in order.
pub const HEADER: [&str; 8] = ["q", "g", "log_R", "R", "R_norm", "err_est", "flag_2qp1", "flag_2qm1"];

/// One line of the batch CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsRow {
    pub q: u64,
    /// Least primitive root mod `q`.
    pub g: u64,
    pub log_r: f64,
    pub r: f64,
    /// `R (log q)^{3/4}`.
    pub r_norm: f64,
    pub err_est: f64,
    /// `2q + 1` is prime.
    pub flag_2qp1: bool,
    /// `2q - 1` is prime.
    pub flag_2qm1: bool,
}

impl StatsRow {
    pub fn from_record(record: &RatioRecord, g: u64) -> Self {
        let q = record.q;
        StatsRow {
            q,
            g,
            log_r: record.log_r,
            r: record.r,
            r_norm: normalized(q, record.r),
            err_est: record.err_est,
            flag_2qp1: is_prime(2 * q + 1),
            flag_2qm1: is_prime(2 * q - 1),
        }
    }

    pub fn fields(&self) -> [String; 8] {
        [
            self.q.to_string(),
            self.g.to_string(),
            fmt_float(self.log_r),
            fmt_float(self.r),
            fmt_float(self.r_norm),
            fmt_float(self.err_est),
            (self.flag_2qp1 as u8).to_string(),
            (self.flag_2qm1 as u8).to_string(),
        ]
    }

    pub fn parse(fields: &csv::StringRecord) -> std::result::Result<Self, String> {
        if fields.len() != HEADER.len() {
            return Err(format!("expected {} fields, found {}", HEADER.len(), fields.len()));
        }
        let int = |i: usize| {
            fields[i]
                .parse::<u64>()
                .map_err(|_| format!("{}: not an integer: {:?}", HEADER[i], &fields[i]))
        };
        let float = |i: usize| {
            fields[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("{}: not a finite number: {:?}", HEADER[i], &fields[i]))
        };
        let flag = |i: usize| match &fields[i] {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(format!("{}: expected 0 or 1, found {other:?}", HEADER[i])),
        };
        Ok(StatsRow {
            q: int(0)?,
            g: int(1)?,
            log_r: float(2)?,
            r: float(3)?,
            r_norm: float(4)?,
            err_est: float(5)?,
            flag_2qp1: flag(6)?,
            flag_2qm1: flag(7)?,
        })
    }
}

/// Shortest decimal that parses back to the same `f64`, in exponent form
/// only for very small or very large magnitudes.
pub fn fmt_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub(crate) fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

pub(crate) fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Schema {
            path: path.to_path_buf(),
            detail: format!("{other:?}"),
        },
    }
}

/// Writes the header and `rows` to `w`.
pub fn write_rows<W: Write>(w: W, rows: &[StatsRow]) -> csv::Result<()> {
    let mut wtr = csv_writer(w);
    wtr.write_record(HEADER)?;
    for row in rows {
        wtr.write_record(row.fields())?;
    }
    wtr.flush()?;
    Ok(())
}

/// Parses CSV text with the batch header. Bad rows are collected with their
/// line numbers and reported together.
pub fn parse_rows<R: Read>(path: &Path, input: R) -> Result<Vec<StatsRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = rdr.records();
    match records.next() {
        None => {
            return Err(Error::Schema {
                path: path.to_path_buf(),
                detail: "empty file".into(),
            })
        }
        Some(header) => {
            let header = header.map_err(|e| csv_err(path, e))?;
            if header.iter().ne(HEADER.iter().copied()) {
                return Err(Error::Schema {
                    path: path.to_path_buf(),
                    detail: format!(
                        "header {:?} differs from {:?}",
                        header.iter().collect::<Vec<_>>(),
                        HEADER
                    ),
                });
            }
        }
    }
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for rec in records {
        match rec {
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line());
                match StatsRow::parse(&rec) {
                    Ok(row) => rows.push(row),
                    Err(msg) => errors.push((line, msg)),
                }
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                errors.push((line, e.to_string()));
            }
        }
    }
    if !errors.is_empty() {
        return Err(Error::MalformedRows {
            path: path.to_path_buf(),
            errors,
        });
    }
    Ok(rows)
}

/// Reads a batch CSV from disk.
pub fn read_rows(path: &Path) -> Result<Vec<StatsRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_rows(path, BufReader::new(file))
}
