use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use serde::{Deserialize, Serialize};

use super::rows::{csv_err, csv_writer, parse_rows, StatsRow, HEADER};
use crate::error::{Error, Result};
use crate::ntheory::{build_field, sieve_primes};
use crate::ratio::{log_ratio_digamma, log_ratio_fft};

pub const SCHEMA_VERSION: u32 = 1;

/// Rows written between flushes of the CSV and the manifest.
const FLUSH_EVERY: usize = 64;

/// Sidecar describing a (possibly partial) batch run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchManifest {
    pub range: [u64; 2],
    /// Largest `q` on disk; `None` before the first row.
    pub completed_through: Option<u64>,
    pub output_path: String,
    pub schema_version: u32,
    pub thread_count: usize,
}

/// Where the manifest for `out` lives.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

impl BatchManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Schema {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })
    }

    fn store(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("json.tmp");
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&tmp, text + "\n").map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Debug)]
pub struct ComputeOptions {
    pub threads: usize,
    pub resume: bool,
    /// Also run the digamma method and report disagreements.
    pub paranoid: bool,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        ComputeOptions {
            threads: 1,
            resume: false,
            paranoid: false,
        }
    }
}

/// A modulus where the FFT and digamma values disagree by more than ten
/// times their combined error estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct ParanoidMismatch {
    pub q: u64,
    pub diff: f64,
    pub limit: f64,
}

#[derive(Clone, Debug)]
pub struct BatchReport {
    pub manifest: BatchManifest,
    /// Rows computed in this call (zero when resuming a finished run).
    pub computed: usize,
    pub mismatches: Vec<ParanoidMismatch>,
}

/// One CSV row for `q`, by the FFT method.
pub fn compute_row(q: u64, paranoid: bool) -> Result<(StatsRow, Option<ParanoidMismatch>)> {
    let field = build_field(q)?;
    let rec = log_ratio_fft(&field)?;
    let mismatch = if paranoid {
        let dig = log_ratio_digamma(&field)?;
        let diff = (rec.log_r - dig.log_r).abs();
        let limit = 10.0 * (rec.err_est + dig.err_est);
        (diff > limit).then_some(ParanoidMismatch { q, diff, limit })
    } else {
        None
    };
    Ok((StatsRow::from_record(&rec, field.generator()), mismatch))
}

/// Rows already on disk for a resumed run. A trailing partial line is cut
/// off; anything else that does not fit the range is an error.
fn load_existing(out: &Path, primes: &[u64]) -> Result<usize> {
    let bytes = match fs::read(out) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(Error::io(out, e)),
    };
    let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    if complete == 0 {
        return Ok(0);
    }
    if complete < bytes.len() {
        let f = OpenOptions::new()
            .write(true)
            .open(out)
            .map_err(|e| Error::io(out, e))?;
        f.set_len(complete as u64).map_err(|e| Error::io(out, e))?;
    }
    let rows = parse_rows(out, &bytes[..complete])?;
    for (i, row) in rows.iter().enumerate() {
        if primes.get(i) != Some(&row.q) {
            return Err(Error::Schema {
                path: out.to_path_buf(),
                detail: format!(
                    "row {} has q = {}, expected {}",
                    i + 1,
                    row.q,
                    primes.get(i).map_or("end of range".to_string(), |p| p.to_string())
                ),
            });
        }
    }
    Ok(rows.len())
}

fn check_manifest(path: &Path, range: [u64; 2], done: usize, primes: &[u64]) -> Result<()> {
    if !path.exists() {
        return Ok(());
    }
    let m = BatchManifest::load(path)?;
    let mismatch = |detail: String| Error::Schema {
        path: path.to_path_buf(),
        detail,
    };
    if m.schema_version != SCHEMA_VERSION {
        return Err(mismatch(format!(
            "schema version {} differs from {SCHEMA_VERSION}",
            m.schema_version
        )));
    }
    if m.range != range {
        return Err(mismatch(format!(
            "range {:?} differs from requested {range:?}",
            m.range
        )));
    }
    let on_disk = done.checked_sub(1).map(|i| primes[i]);
    if m.completed_through > on_disk {
        return Err(mismatch(format!(
            "manifest records progress through {:?} but the CSV only reaches {on_disk:?}",
            m.completed_through
        )));
    }
    Ok(())
}

/// Computes one row per prime in `[q_min, q_max]` into `out`, in ascending
/// order of `q` whatever the thread count, with a JSON manifest beside it.
pub fn compute_range(q_min: u64, q_max: u64, opts: &ComputeOptions, out: &Path) -> Result<BatchReport> {
    if q_min < 3 || q_min > q_max {
        return Err(Error::Input(format!(
            "need 3 <= q_min <= q_max, got [{q_min}, {q_max}]"
        )));
    }
    let threads = opts.threads.max(1);
    let primes: Vec<u64> = sieve_primes(q_max).into_iter().filter(|&p| p >= q_min).collect();
    let range = [q_min, q_max];
    let mpath = manifest_path(out);

    let done = if opts.resume { load_existing(out, &primes)? } else { 0 };
    if opts.resume {
        check_manifest(&mpath, range, done, &primes)?;
    }
    let file = if done > 0 {
        OpenOptions::new().append(true).open(out)
    } else {
        File::create(out)
    }
    .map_err(|e| Error::io(out, e))?;
    let mut wtr = csv_writer(BufWriter::new(file));
    if done == 0 {
        wtr.write_record(HEADER).map_err(|e| csv_err(out, e))?;
    }

    let mut manifest = BatchManifest {
        range,
        completed_through: done.checked_sub(1).map(|i| primes[i]),
        output_path: out.display().to_string(),
        schema_version: SCHEMA_VERSION,
        thread_count: threads,
    };
    wtr.flush().map_err(|e| Error::io(out, e))?;
    manifest.store(&mpath)?;

    let todo = &primes[done..];
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let mut mismatches = Vec::new();
    let mut written = 0;
    let mut failure = None;

    thread::scope(|s| {
        let (tx, rx) = mpsc::channel();
        for _ in 0..threads {
            let tx = tx.clone();
            let (next, stop) = (&next, &stop);
            s.spawn(move || {
                while !stop.load(Ordering::Relaxed) {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&q) = todo.get(i) else { break };
                    if tx.send((i, compute_row(q, opts.paranoid))).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let sink = || -> Result<()> {
            for (i, res) in rx {
                pending.insert(i, res?);
                while let Some((row, mismatch)) = pending.remove(&written) {
                    wtr.write_record(row.fields()).map_err(|e| csv_err(out, e))?;
                    mismatches.extend(mismatch);
                    written += 1;
                    if written % FLUSH_EVERY == 0 {
                        wtr.flush().map_err(|e| Error::io(out, e))?;
                        manifest.completed_through = Some(row.q);
                        manifest.store(&mpath)?;
                    }
                }
            }
            Ok(())
        };
        if let Err(e) = sink() {
            stop.store(true, Ordering::Relaxed);
            failure = Some(e);
        }
    });

    wtr.flush().map_err(|e| Error::io(out, e))?;
    if written > 0 {
        manifest.completed_through = Some(todo[written - 1]);
    }
    manifest.store(&mpath)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(BatchReport {
        manifest,
        computed: written,
        mismatches,
    })
}
