//! Batch runs over prime ranges: the CSV format, resumable parallel
//! computation, summaries, bound tables and SVG figures.

mod batch;
mod rows;
mod summary;
mod svg;

use std::io::Write;

pub use batch::{
    compute_range, compute_row, manifest_path, BatchManifest, BatchReport, ComputeOptions, ParanoidMismatch,
    SCHEMA_VERSION,
};
pub use rows::{fmt_float, parse_rows, read_rows, write_rows, StatsRow, HEADER};
pub use summary::{summarize, summarize_rows, Extreme, GroupStats, Summary, SUBGROUP_MIN_Q};
pub use svg::{attr, histogram_svg, plot_histogram, plot_scatter, scatter_mean_from_svg, scatter_svg, Bins};

use crate::bounds::{check_dusart, BoundReport};
use crate::error::Result;
use crate::primesum::{sigma2, DEFAULT_A};

/// Options for [`bound_table`].
#[derive(Clone, Debug, Default)]
pub struct BoundOptions {
    /// Compute `Sigma_2` to this many decimals for rows with `q` up to
    /// `sigma2_max_q`.
    pub sigma2_delta: Option<u32>,
    pub sigma2_max_q: u64,
    /// Evaluate Dusart's inequality at this `x` (shared by every row).
    pub dusart_x: Option<f64>,
}

/// One [`BoundReport`] per row.
pub fn bound_table(rows: &[StatsRow], opts: &BoundOptions) -> Result<Vec<BoundReport>> {
    let dusart = opts.dusart_x.map(check_dusart).transpose()?;
    rows.iter()
        .map(|row| {
            let s2 = match opts.sigma2_delta {
                Some(delta) if row.q <= opts.sigma2_max_q => Some(sigma2(row.q, DEFAULT_A, delta)?),
                _ => None,
            };
            Ok(BoundReport::new(row.q, row.r, s2, dusart))
        })
        .collect()
}

/// Column names of the bound table.
pub const BOUND_HEADER: [&str; 7] = [
    "q",
    "lemma1_bound",
    "refined_bound",
    "sigma2_ok",
    "envelope_ok",
    "normalized_ok",
    "dusart_ok",
];

/// Writes the bound table as CSV; absent checks are left empty.
pub fn write_bound_table<W: Write>(w: W, reports: &[BoundReport]) -> csv::Result<()> {
    let flag = |b: Option<bool>| b.map_or(String::new(), |b| (b as u8).to_string());
    let mut wtr = rows::csv_writer(w);
    wtr.write_record(BOUND_HEADER)?;
    for r in reports {
        wtr.write_record([
            r.q.to_string(),
            fmt_float(r.lemma1_bound),
            fmt_float(r.refined_bound),
            flag(r.sigma2_ok),
            flag(Some(r.envelope_ok)),
            flag(Some(r.normalized_ok)),
            flag(r.dusart_ok),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
