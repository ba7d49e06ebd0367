//! Explicit inequalities: the prime-power bound and its refinement, the
//! ratio envelopes, and Dusart's estimate for `sum 1/p`.

use crate::error::{Error, Result};
use crate::ntheory::{prime_reciprocal_sum, reciprocal_sum_of};
use crate::ratio::RatioRecord;
use crate::specfun::{constants, digamma_unchecked, exp_integral_e1, ZETA_2};

/// Lower envelope constant `e^{-1.87}`.
pub const ENVELOPE_LOWER: f64 = -1.87;
/// Upper envelope constant `e^{0.51}`.
pub const ENVELOPE_UPPER: f64 = 0.51;
/// Envelopes are only meaningful for large `q`; below this they are
/// reported but not expected to hold.
pub const ENVELOPE_MIN_Q: u64 = 1000;
/// Open interval expected to contain `R(q) (log q)^{3/4}`.
pub const NORMALIZED_RANGE: (f64, f64) = (0.19, 0.68);
/// Smallest `x` covered by Dusart's inequality.
pub const DUSART_MIN_X: f64 = 2_278_383.0;

/// `A + (zeta(2) - A)/q`, the bound on the prime-power contribution.
pub fn lemma1_bound(q: u64) -> f64 {
    let a = constants().a_const;
    a + (ZETA_2 - a) / q as f64
}

/// `((q-1)/q)(A + psi(2/q) - psi(1/q)) - (q-1)/2`, evaluated as
/// `((q-1)/q)(A + psi(1 + 2/q) - psi(1 + 1/q))`.
pub fn refined_bound(q: u64) -> f64 {
    let qf = q as f64;
    let a = constants().a_const;
    let d = digamma_unchecked(1.0 + 2.0 / qf) - digamma_unchecked(1.0 + 1.0 / qf);
    (qf - 1.0) / qf * (a + d)
}

/// The envelope `e^{-1.87} / (log q)^{1-xi} < R(q) < e^{0.51} (log q)^{1-xi}`
/// at a given `xi`, as `(lower, upper)`.
pub fn envelope(q: u64, xi: f64) -> (f64, f64) {
    let l = (q as f64).ln().powf(1.0 - xi);
    (ENVELOPE_LOWER.exp() / l, ENVELOPE_UPPER.exp() * l)
}

/// Whether the record lies inside the `xi = 0` envelope.
pub fn check_envelope(record: &RatioRecord) -> bool {
    envelope_holds(record.q, record.r)
}

pub fn envelope_holds(q: u64, r: f64) -> bool {
    let (lo, hi) = envelope(q, 0.0);
    lo < r && r < hi
}

/// `R(q) (log q)^{3/4}`.
pub fn normalized(q: u64, r: f64) -> f64 {
    r * (q as f64).ln().powf(0.75)
}

pub fn check_normalized(record: &RatioRecord) -> bool {
    normalized_holds(record.q, record.r)
}

pub fn normalized_holds(q: u64, r: f64) -> bool {
    let v = normalized(q, r);
    NORMALIZED_RANGE.0 < v && v < NORMALIZED_RANGE.1
}

/// The envelope in the presence of a real zero `beta0` of some `L(s, chi)`:
/// both sides carry `e^{-E1(1 - beta0)} (log q)^2 l(q)^{+-1}`.
pub fn siegel_envelope(q: u64, beta0: f64, ell: f64) -> Result<(f64, f64)> {
    if !(beta0 > 0.0 && beta0 < 1.0) {
        return Err(Error::Domain {
            func: "siegel_envelope",
            arg: beta0,
            domain: "0 < beta0 < 1",
        });
    }
    if !(ell > 0.0) {
        return Err(Error::Domain {
            func: "siegel_envelope",
            arg: ell,
            domain: "l(q) > 0",
        });
    }
    let damp = (-exp_integral_e1(1.0 - beta0)?).exp();
    let l2 = (q as f64).ln().powi(2) * ell;
    Ok((ENVELOPE_LOWER.exp() * damp / l2, ENVELOPE_UPPER.exp() * damp * l2))
}

fn dusart_holds(sum: f64, x: f64) -> bool {
    let lx = x.ln();
    (sum - lx.ln() - constants().meissel_mertens).abs() <= 0.2 / lx.powi(3)
}

fn check_dusart_domain(x: f64) -> Result<()> {
    if !(x >= DUSART_MIN_X) {
        return Err(Error::Domain {
            func: "check_dusart",
            arg: x,
            domain: "x >= 2278383",
        });
    }
    Ok(())
}

/// `|sum_{p<=x} 1/p - log log x - M| <= 0.2 / (log x)^3`.
pub fn check_dusart(x: f64) -> Result<bool> {
    check_dusart_domain(x)?;
    Ok(dusart_holds(prime_reciprocal_sum(x), x))
}

/// [`check_dusart`] against a prime list covering `x`.
pub fn check_dusart_with(primes: &[u64], x: f64) -> Result<bool> {
    check_dusart_domain(x)?;
    if primes.last().is_none_or(|&p| (p as f64) < x.floor() - 1000.0) {
        return Err(Error::Input(format!("prime list does not reach x = {x}")));
    }
    Ok(dusart_holds(reciprocal_sum_of(primes, x), x))
}

/// Pass/fail summary of the bounds for one modulus.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub q: u64,
    pub lemma1_bound: f64,
    pub refined_bound: f64,
    /// `|Sigma_2| <= lemma1_bound`, when `Sigma_2` was computed.
    pub sigma2_ok: Option<bool>,
    pub envelope_ok: bool,
    pub normalized_ok: bool,
    /// Dusart's inequality, when an `x` was supplied.
    pub dusart_ok: Option<bool>,
}

impl BoundReport {
    /// Report for modulus `q` with ratio `r`.
    pub fn new(q: u64, r: f64, sigma2: Option<f64>, dusart: Option<bool>) -> Self {
        let lemma1 = lemma1_bound(q);
        BoundReport {
            q,
            lemma1_bound: lemma1,
            refined_bound: refined_bound(q),
            sigma2_ok: sigma2.map(|s| s.abs() <= lemma1),
            envelope_ok: envelope_holds(q, r),
            normalized_ok: normalized_holds(q, r),
            dusart_ok: dusart,
        }
    }

    /// Whether the envelope is expected to hold at this `q`.
    pub fn envelope_applies(&self) -> bool {
        self.q >= ENVELOPE_MIN_Q
    }
}
