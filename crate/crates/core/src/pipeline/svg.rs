use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::rows::{fmt_float, read_rows, StatsRow};
use super::summary::{summarize_rows, SUBGROUP_MIN_Q};
use crate::error::{Error, Result};

pub const WIDTH: f64 = 960.0;
pub const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const POINT: &str = "#1f4e99";
const HIGHLIGHT: &str = "#d62728";
const MEAN: &str = "#d62728";
const TOTAL: &str = "#9e9e9e";
const QP1: &str = "#2ca02c";
const QM1: &str = "#e6c619";
const MAX_BINS: usize = 10_000;

/// Linear map from a data rectangle to the plot area.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, v: f64) -> f64 {
        LEFT + (v - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    /// Inverse of [`Frame::py`].
    fn data_y(&self, py: f64) -> f64 {
        self.y.0 + (HEIGHT - BOTTOM - py) / (HEIGHT - TOP - BOTTOM) * (self.y.1 - self.y.0)
    }
}

/// `(lo, hi)` widened so that a degenerate range still has extent.
fn padded(lo: f64, hi: f64, frac: f64) -> (f64, f64) {
    if hi > lo {
        let pad = (hi - lo) * frac;
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        (lo - pad, hi + pad)
    }
}

fn c(v: f64) -> String {
    format!("{v:.2}")
}

fn header(svg: &mut String, title: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{title}</text>"#,
        c(WIDTH / 2.0)
    );
}

fn axes(svg: &mut String, f: &Frame, xlabel: &str, ylabel: &str, x_int: bool) {
    let (x0, y0) = (LEFT, HEIGHT - BOTTOM);
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{TOP}"/></g>"#,
        WIDTH - RIGHT
    );
    let mut ticks = String::new();
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let xv = f.x.0 + t * (f.x.1 - f.x.0);
        let yv = f.y.0 + t * (f.y.1 - f.y.0);
        let (px, py) = (f.px(xv), f.py(yv));
        let xl = if x_int {
            format!("{}", xv.round() as i64)
        } else {
            format!("{xv:.3}")
        };
        let _ = write!(
            ticks,
            r#"<line class="tick" x1="{px}" y1="{y0}" x2="{px}" y2="{y5}" stroke="black"/><text x="{px}" y="{ty}" text-anchor="middle">{xl}</text><line class="tick" x1="{x0}" y1="{py}" x2="{x5}" y2="{py}" stroke="black"/><text x="{tx}" y="{pyt}" text-anchor="end">{yv:.3}</text>"#,
            px = c(px),
            py = c(py),
            y5 = c(y0 + 5.0),
            ty = c(y0 + 20.0),
            x5 = c(x0 - 5.0),
            tx = c(x0 - 8.0),
            pyt = c(py + 4.0),
        );
    }
    let _ = writeln!(svg, "<g class=\"ticks\">{ticks}</g>");
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
        c(LEFT + (WIDTH - LEFT - RIGHT) / 2.0),
        c(HEIGHT - 15.0)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{y}" text-anchor="middle" transform="rotate(-90 20 {y})">{ylabel}</text>"#,
        y = c(TOP + (HEIGHT - TOP - BOTTOM) / 2.0)
    );
}

fn value_of(row: &StatsRow, normalized: bool) -> f64 {
    if normalized {
        row.r_norm
    } else {
        row.r
    }
}

fn labels(normalized: bool) -> (&'static str, &'static str) {
    if normalized {
        ("R(q) (log q)^(3/4)", "R(q) (log q)^(3/4)")
    } else {
        ("R(q)", "R(q)")
    }
}

/// Scatter plot of `(q, R)` or `(q, R_norm)` with a dashed mean line and
/// `q = 3` drawn in red.
pub fn scatter_svg(rows: &[StatsRow], normalized: bool) -> Result<String> {
    let summary = summarize_rows(rows).ok_or_else(|| Error::Input("nothing to plot".into()))?;
    let mean = if normalized {
        summary.mean_r_norm
    } else {
        summary.mean_r
    };
    let lo = if normalized {
        summary.min_r_norm.value
    } else {
        summary.min_r.value
    };
    let hi = if normalized {
        summary.max_r_norm.value
    } else {
        summary.max_r.value
    };
    let qs = (
        rows.iter().map(|r| r.q).min().unwrap(),
        rows.iter().map(|r| r.q).max().unwrap(),
    );
    let frame = Frame {
        x: padded(qs.0 as f64, qs.1 as f64, 0.02),
        y: padded(lo, hi, 0.05),
    };
    let (title, ylabel) = labels(normalized);
    let mut svg = String::new();
    header(&mut svg, title);
    axes(&mut svg, &frame, "q", ylabel, true);
    let _ = writeln!(svg, r#"<g class="points" fill="{POINT}">"#);
    for r in rows {
        let v = value_of(r, normalized);
        let extra = if r.q == 3 {
            format!(r#" fill="{HIGHLIGHT}" r="4""#)
        } else {
            r#" r="1.5""#.to_string()
        };
        let _ = writeln!(
            svg,
            r#"<circle cx="{}" cy="{}"{extra} data-q="{}"/>"#,
            c(frame.px(r.q as f64)),
            c(frame.py(v)),
            r.q
        );
    }
    let _ = writeln!(svg, "</g>");
    mean_line_h(&mut svg, &frame, mean);
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

fn mean_line_h(svg: &mut String, f: &Frame, mean: f64) {
    let y = c(f.py(mean));
    let _ = writeln!(
        svg,
        r#"<line class="mean" x1="{LEFT}" y1="{y}" x2="{}" y2="{y}" stroke="{MEAN}" stroke-width="1.5" stroke-dasharray="8 5" data-mean="{}"/>"#,
        WIDTH - RIGHT,
        fmt_float(mean)
    );
}

/// Type-7 sample quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Freedman-Diaconis bins: width `2 IQR n^{-1/3}`, left edge at the
/// minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct Bins {
    pub start: f64,
    pub width: f64,
    pub count: usize,
}

impl Bins {
    pub fn freedman_diaconis(values: &[f64]) -> Result<Bins> {
        if values.len() < 2 {
            return Err(Error::Input("a histogram needs at least two values".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
        let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
        let mut width = 2.0 * iqr / (values.len() as f64).cbrt();
        if !(width > 0.0) {
            width = if max > min { max - min } else { 1.0 };
        }
        let mut count = (((max - min) / width).ceil() as usize).max(1);
        if count > MAX_BINS {
            count = MAX_BINS;
            width = (max - min) / MAX_BINS as f64;
        }
        Ok(Bins {
            start: min,
            width,
            count,
        })
    }

    pub fn index(&self, v: f64) -> usize {
        let i = ((v - self.start) / self.width).floor();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.count - 1)
        }
    }

    pub fn edge(&self, i: usize) -> f64 {
        self.start + i as f64 * self.width
    }

    pub fn counts<'a>(&self, values: impl IntoIterator<Item = &'a f64>) -> Vec<usize> {
        let mut out = vec![0; self.count];
        for &v in values {
            out[self.index(v)] += 1;
        }
        out
    }
}

/// Histogram of `R` or `R_norm` over all rows, with the `q >= 5` rows where
/// `2q + 1` (green) or `2q - 1` (yellow) is prime superimposed on the same
/// bins, and a dashed line at the overall mean.
pub fn histogram_svg(rows: &[StatsRow], normalized: bool) -> Result<String> {
    let values: Vec<f64> = rows.iter().map(|r| value_of(r, normalized)).collect();
    let bins = Bins::freedman_diaconis(&values)?;
    let summary = summarize_rows(rows).expect("at least two rows");
    let mean = if normalized {
        summary.mean_r_norm
    } else {
        summary.mean_r
    };
    let sub = |flag: fn(&StatsRow) -> bool| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.q >= SUBGROUP_MIN_Q && flag(r))
            .map(|r| value_of(r, normalized))
            .collect()
    };
    let total = bins.counts(&values);
    let qp1 = bins.counts(&sub(|r| r.flag_2qp1));
    let qm1 = bins.counts(&sub(|r| r.flag_2qm1));
    let top = *total.iter().max().unwrap() as f64;
    let frame = Frame {
        x: (bins.start, bins.edge(bins.count)),
        y: (0.0, top * 1.05),
    };
    let (title, xlabel) = labels(normalized);
    let mut svg = String::new();
    header(&mut svg, &format!("Distribution of {title}"));
    axes(&mut svg, &frame, xlabel, "count", false);
    for (class, fill, opacity, counts) in [
        ("total", TOTAL, "1", &total),
        ("qp1", QP1, "0.7", &qp1),
        ("qm1", QM1, "0.7", &qm1),
    ] {
        let _ = writeln!(svg, r#"<g class="{class}" fill="{fill}" fill-opacity="{opacity}">"#);
        for (i, &n) in counts.iter().enumerate() {
            let x0 = frame.px(bins.edge(i));
            let x1 = frame.px(bins.edge(i + 1));
            let y = frame.py(n as f64);
            let _ = writeln!(
                svg,
                r#"<rect x="{}" y="{}" width="{}" height="{}" data-count="{n}"/>"#,
                c(x0),
                c(y),
                c(x1 - x0),
                c(HEIGHT - BOTTOM - y)
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    let x = c(frame.px(mean));
    let _ = writeln!(
        svg,
        r#"<line class="mean" x1="{x}" y1="{}" x2="{x}" y2="{TOP}" stroke="{MEAN}" stroke-width="1.5" stroke-dasharray="8 5" data-mean="{}"/>"#,
        HEIGHT - BOTTOM,
        fmt_float(mean)
    );
    let lx = WIDTH - RIGHT - 170.0;
    for (i, (fill, text)) in [
        (TOTAL, "all q"),
        (QP1, "q >= 5, 2q+1 prime"),
        (QM1, "q >= 5, 2q-1 prime"),
    ]
    .iter()
    .enumerate()
    {
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<rect class="legend" x="{lx}" y="{}" width="12" height="12" fill="{fill}"/><text x="{}" y="{}">{text}</text>"#,
            c(ly - 10.0),
            c(lx + 18.0),
            c(ly)
        );
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

fn write_svg(out: &Path, svg: &str) -> Result<()> {
    fs::write(out, svg).map_err(|e| Error::io(out, e))
}

pub fn plot_scatter(input: &Path, normalized: bool, out: &Path) -> Result<()> {
    let rows = read_rows(input)?;
    write_svg(out, &scatter_svg(&rows, normalized)?)
}

pub fn plot_histogram(input: &Path, normalized: bool, out: &Path) -> Result<()> {
    let rows = read_rows(input)?;
    write_svg(out, &histogram_svg(&rows, normalized)?)
}

/// The data value under the mean line of a scatter plot produced by
/// [`scatter_svg`], read back from its pixel position.
pub fn scatter_mean_from_svg(svg: &str, rows: &[StatsRow], normalized: bool) -> Option<f64> {
    let line = svg.lines().find(|l| l.contains(r#"class="mean""#))?;
    let y1 = attr(line, "y1")?.parse::<f64>().ok()?;
    let summary = summarize_rows(rows)?;
    let (lo, hi) = if normalized {
        (summary.min_r_norm.value, summary.max_r_norm.value)
    } else {
        (summary.min_r.value, summary.max_r.value)
    };
    let frame = Frame {
        x: (0.0, 1.0),
        y: padded(lo, hi, 0.05),
    };
    Some(frame.data_y(y1))
}

/// Value of `name="..."` within one SVG element.
pub fn attr<'a>(element: &'a str, name: &str) -> Option<&'a str> {
    let key = format!(" {name}=\"");
    let start = element.find(&key)? + key.len();
    let len = element[start..].find('"')?;
    Some(&element[start..start + len])
}
