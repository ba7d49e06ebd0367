//! Brauer-Siegel ratios `R(q) = prod_{chi != chi_0} L(1, chi)` of prime
//! cyclotomic fields.
//!
//! The production path evaluates all `L(1, chi)` mod `q` at once through
//! length-`(q-1)` character sums computed with an arbitrary-length FFT
//! ([`ratio::log_ratio_fft`]). Two further routes cross-check it: the
//! digamma formula and a quadratic per-character loop. [`primesum`]
//! recomputes `log R(q)` and its prime / prime-power split from truncated
//! Euler products with certified truncation bounds, and [`bounds`] evaluates
//! the explicit inequalities that accompany these quantities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod fft;
pub mod ntheory;
pub mod pipeline;
pub mod primesum;
pub mod ratio;
pub mod specfun;
pub mod sum;

pub use bounds::BoundReport;
pub use error::{Error, Result};
pub use fft::{CharSpectrum, ComplexSeq};
pub use ntheory::PrimeField;
pub use pipeline::{BatchManifest, StatsRow};
pub use primesum::{SigmaSplit, TruncationPlan};
pub use ratio::{Method, RatioRecord};
pub use specfun::ConstantsTable;
