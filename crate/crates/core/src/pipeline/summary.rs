use std::path::Path;

use serde::Serialize;

use super::rows::{read_rows, StatsRow};
use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Subpopulations of the flagged primes only include `q >= 5`.
pub const SUBGROUP_MIN_Q: u64 = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extreme {
    pub q: u64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupStats {
    pub count: usize,
    pub mean_r: Option<f64>,
    pub mean_r_norm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean_r: f64,
    pub mean_r_norm: f64,
    pub min_r: Extreme,
    pub max_r: Extreme,
    pub min_r_norm: Extreme,
    pub max_r_norm: Extreme,
    /// `q >= 5` with `2q + 1` prime.
    pub sophie_germain: GroupStats,
    /// `q >= 5` with `2q - 1` prime.
    pub twin_2qm1: GroupStats,
    /// Least-squares slope of `log R` against `log log q` over `q >= 5`,
    /// i.e. the exponent `s` in `R ~ c (log q)^s`.
    pub loglog_slope: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut s = NeumaierSum::new();
    let mut n = 0usize;
    for v in values {
        s += v;
        n += 1;
    }
    (n > 0).then(|| s.value() / n as f64)
}

fn extreme(rows: &[StatsRow], key: impl Fn(&StatsRow) -> f64, want_max: bool) -> Extreme {
    let mut best = &rows[0];
    for r in &rows[1..] {
        let (a, b) = (key(r), key(best));
        if (want_max && a > b) || (!want_max && a < b) {
            best = r;
        }
    }
    Extreme {
        q: best.q,
        value: key(best),
    }
}

fn group(rows: &[StatsRow], pick: impl Fn(&StatsRow) -> bool) -> GroupStats {
    let sel: Vec<&StatsRow> = rows.iter().filter(|r| r.q >= SUBGROUP_MIN_Q && pick(r)).collect();
    GroupStats {
        count: sel.len(),
        mean_r: mean(sel.iter().map(|r| r.r)),
        mean_r_norm: mean(sel.iter().map(|r| r.r_norm)),
    }
}

fn loglog_slope(rows: &[StatsRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.q >= SUBGROUP_MIN_Q)
        .map(|r| ((r.q as f64).ln().ln(), r.log_r))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let mx = mean(pts.iter().map(|p| p.0))?;
    let my = mean(pts.iter().map(|p| p.1))?;
    let sxy: NeumaierSum = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).collect();
    let sxx: NeumaierSum = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).collect();
    (sxx.value() > 0.0).then(|| sxy.value() / sxx.value())
}

/// Summary statistics of already-parsed rows; `None` when empty.
pub fn summarize_rows(rows: &[StatsRow]) -> Option<Summary> {
    if rows.is_empty() {
        return None;
    }
    Some(Summary {
        count: rows.len(),
        mean_r: mean(rows.iter().map(|r| r.r))?,
        mean_r_norm: mean(rows.iter().map(|r| r.r_norm))?,
        min_r: extreme(rows, |r| r.r, false),
        max_r: extreme(rows, |r| r.r, true),
        min_r_norm: extreme(rows, |r| r.r_norm, false),
        max_r_norm: extreme(rows, |r| r.r_norm, true),
        sophie_germain: group(rows, |r| r.flag_2qp1),
        twin_2qm1: group(rows, |r| r.flag_2qm1),
        loglog_slope: loglog_slope(rows),
    })
}

/// Reads a batch CSV and summarizes it.
pub fn summarize(path: &Path) -> Result<Summary> {
    let rows = read_rows(path)?;
    summarize_rows(&rows).ok_or_else(|| Error::Input(format!("{}: no data rows", path.display())))
}
