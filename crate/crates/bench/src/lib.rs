//! Criterion benchmarks for the bsratio crate; see `benches/`.
