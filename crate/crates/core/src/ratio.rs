//! `log R(q)` for prime `q` by three independent routes.
//!
//! For odd `chi`, `|L(1, chi)| = (pi / sqrt q) |sum_a (a/q) chi(a)|`; for
//! even non-principal `chi`, `|L(1, chi)| = (2 / sqrt q) |sum_a chi(a)
//! log Gamma(a/q)|` (the Gauss sum has modulus `sqrt q`). Summing logs over
//! each parity class gives the FFT route. The digamma route uses
//! `L(1, chi) = -(1/q) sum_a chi(a) psi(a/q)` for every non-principal `chi`,
//! and the naive route evaluates the first pair of formulas one character
//! at a time.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{self, CharSpectrum, DftPlan};
use crate::ntheory::PrimeField;
use crate::specfun::{digamma_unchecked, log_gamma_unchecked};
use crate::sum::{ComplexNeumaierSum, NeumaierSum};

/// Any character sum smaller than this is treated as a computational fault.
pub const DEGENERACY_FLOOR: f64 = 1e-30;

/// Largest modulus accepted by [`log_ratio_naive`].
pub const NAIVE_COST_GUARD: u64 = 100_000;

/// Constant in the heuristic rounding budget `err_est`.
const ERR_CONST: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Fft,
    Digamma,
    Naive,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fft => "FFT",
            Method::Digamma => "DIGAMMA",
            Method::Naive => "NAIVE",
        })
    }
}

/// One computed value of `log R(q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioRecord {
    pub q: u64,
    pub log_r: f64,
    pub r: f64,
    /// `sum log |L(1, chi)|` over odd characters.
    pub odd_part: f64,
    /// The same over even non-principal characters.
    pub even_part: f64,
    pub method: Method,
    /// Heuristic forward rounding-error budget for `log_r`; not a certified
    /// bound.
    pub err_est: f64,
}

impl RatioRecord {
    fn new(q: u64, odd: Part, even: Part, method: Method) -> Self {
        let log_r = odd.value + even.value;
        let err_est = odd.err + even.err + f64::EPSILON * log_r.abs();
        RatioRecord {
            q,
            log_r,
            r: log_r.exp(),
            odd_part: odd.value,
            even_part: even.value,
            method,
            err_est,
        }
    }
}

/// A parity-class subtotal with its rounding budget.
#[derive(Clone, Copy, Debug)]
struct Part {
    value: f64,
    err: f64,
}

/// How the parity classes are extracted from the character sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Decimation {
    /// One full-length transform per sampled function, filtered by index.
    IndexFilter,
    /// Two half-length transforms on the (anti)symmetric parts.
    #[default]
    HalfLength,
}

/// Sum of `prefactor + log |S_j|` over the given character sums.
///
/// `l1` is `sum |f(a)|`; `fft_depth` scales the rounding budget of each
/// `S_j` (1 for direct summation).
fn log_abs_total<'a>(
    q: u64,
    sums: impl Iterator<Item = (usize, &'a Complex64)>,
    prefactor: f64,
    l1: f64,
    fft_depth: f64,
) -> Result<Part> {
    let mut total = NeumaierSum::new();
    let mut err = 0.0;
    let mut magnitude = 0.0;
    for (j, s) in sums {
        let m = s.norm();
        if !(m > DEGENERACY_FLOOR) {
            return Err(Error::NumericalDegeneracy {
                q,
                index: j,
                magnitude: m,
            });
        }
        let term = prefactor + m.ln();
        total += term;
        magnitude += term.abs();
        err += ERR_CONST * f64::EPSILON * fft_depth * l1 / m;
    }
    err += f64::EPSILON * magnitude;
    Ok(Part {
        value: total.value(),
        err,
    })
}

fn fft_depth(n: usize) -> f64 {
    (n as f64).log2().ceil().max(1.0)
}

/// Per-character prefactor for odd characters: `log pi - (log q)/2`.
fn odd_prefactor(q: u64) -> f64 {
    PI.ln() - 0.5 * (q as f64).ln()
}

/// Per-character prefactor for even characters: `log 2 - (log q)/2`.
fn even_prefactor(q: u64) -> f64 {
    LN_2 - 0.5 * (q as f64).ln()
}

fn log_gamma_at(q: u64) -> impl Fn(u64) -> f64 {
    move |a| log_gamma_unchecked(a as f64 / q as f64)
}

fn odd_from_spectrum(q: u64, spec: &CharSpectrum) -> Result<Part> {
    let n = spec.len();
    let l1 = (q - 1) as f64 / 2.0;
    let (odd, _) = fft::parity_split(spec);
    log_abs_total(
        q,
        odd.iter().map(|&j| (j, &spec.sums()[j])),
        odd_prefactor(q),
        l1,
        fft_depth(n),
    )
}

fn even_from_spectrum(q: u64, spec: &CharSpectrum, l1: f64) -> Result<Part> {
    let n = spec.len();
    let (_, even) = fft::parity_split(spec);
    log_abs_total(
        q,
        even.iter().map(|&j| (j, &spec.sums()[j])),
        even_prefactor(q),
        l1,
        fft_depth(n),
    )
}

/// `sum_{chi odd} log L(1, chi)`, i.e. `((q-1)/2)(log pi - (log q)/2) +
/// sum_{chi odd} log |sum_a (a/q) chi(a)|`.
pub fn odd_log_sum(field: &PrimeField) -> Result<f64> {
    let q = field.q();
    let spec = fft::char_spectrum(field, |a| a as f64 / q as f64);
    Ok(odd_from_spectrum(q, &spec)?.value)
}

/// `sum_{chi even, chi != chi_0} log L(1, chi)`, i.e. `((q-3)/2)(log 2 -
/// (log q)/2) + sum log |sum_a conj(chi)(a) log Gamma(a/q)|`.
pub fn even_log_sum(field: &PrimeField) -> Result<f64> {
    let q = field.q();
    let lg = log_gamma_at(q);
    let l1: f64 = (1..q).map(|a| lg(a).abs()).sum();
    let spec = fft::char_spectrum(field, lg);
    Ok(even_from_spectrum(q, &spec, l1)?.value)
}

/// `log R(q)` through FFT character sums (the production path).
pub fn log_ratio_fft(field: &PrimeField) -> Result<RatioRecord> {
    log_ratio_fft_with(field, Decimation::default())
}

pub fn log_ratio_fft_with(field: &PrimeField, decimation: Decimation) -> Result<RatioRecord> {
    let q = field.q();
    match decimation {
        Decimation::IndexFilter => {
            let lg = log_gamma_at(q);
            let plan = DftPlan::new(field.order());
            let spec = fft::char_spectrum_with(&plan, field, |a| a as f64 / q as f64);
            let odd = odd_from_spectrum(q, &spec)?;
            let samples = fft::sample_by_dlog(field, &lg);
            let l1 = samples.iter().map(|z| z.re.abs()).sum();
            let spec = fft::char_spectrum_with(&plan, field, lg);
            let even = even_from_spectrum(q, &spec, l1)?;
            Ok(RatioRecord::new(q, odd, even, Method::Fft))
        }
        Decimation::HalfLength => {
            let h = field.order() / 2;
            let plan = DftPlan::new(h);
            let depth = fft_depth(h) + 1.0;
            let x = fft::sample_by_dlog(field, |a| a as f64 / q as f64);
            let odd_sums = fft::odd_half(&plan, &x);
            let odd = log_abs_total(
                q,
                odd_sums.iter().enumerate().map(|(r, s)| (2 * r + 1, s)),
                odd_prefactor(q),
                (q - 1) as f64 / 2.0,
                depth,
            )?;
            // only log Gamma(x) + log Gamma(1-x) = log pi - log sin(pi x)
            // reaches the even sums, and the constant cancels for chi != chi_0
            let sym: Vec<Complex64> = field.powers()[..h]
                .iter()
                .map(|&a| {
                    let b = a.min(q as u32 - a);
                    Complex64::new(-(PI * b as f64 / q as f64).sin().ln(), 0.0)
                })
                .collect();
            let l1 = sym.iter().map(|z| z.re.abs()).sum();
            let even_sums = fft::even_half_symmetric(&plan, sym);
            let even = log_abs_total(
                q,
                even_sums.iter().enumerate().skip(1).map(|(r, s)| (2 * r, s)),
                even_prefactor(q),
                l1,
                depth,
            )?;
            Ok(RatioRecord::new(q, odd, even, Method::Fft))
        }
    }
}

/// `log R(q) = -(q-2) log q + sum_{chi != chi_0} log |sum_a chi(a) psi(a/q)|`.
pub fn log_ratio_digamma(field: &PrimeField) -> Result<RatioRecord> {
    let q = field.q();
    let psi = |a: u64| digamma_unchecked(a as f64 / q as f64);
    let samples = fft::sample_by_dlog(field, psi);
    let l1 = samples.iter().map(|z| z.re.abs()).sum();
    let spec = fft::char_spectrum(field, psi);
    let (odd, even) = fft::parity_split(&spec);
    let pre = -(q as f64).ln();
    let depth = fft_depth(spec.len());
    let odd = log_abs_total(q, odd.iter().map(|&j| (j, &spec.sums()[j])), pre, l1, depth)?;
    let even = log_abs_total(q, even.iter().map(|&j| (j, &spec.sums()[j])), pre, l1, depth)?;
    Ok(RatioRecord::new(q, odd, even, Method::Digamma))
}

/// `e(t/n)` for `t < n`, each from its own trig call.
fn root_table(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|t| {
            let (s, c) = (2.0 * PI * t as f64 / n as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

/// `sum_k x[k] e(jk/n)` by direct compensated summation.
fn direct_char_sum(x: &[f64], roots: &[Complex64], j: usize) -> Complex64 {
    let n = x.len();
    let mut acc = ComplexNeumaierSum::new();
    let mut idx = 0;
    for &v in x {
        acc += roots[idx] * v;
        idx += j;
        if idx >= n {
            idx -= n;
        }
    }
    acc.value()
}

fn check_naive_guard(q: u64) -> Result<()> {
    if q > NAIVE_COST_GUARD {
        return Err(Error::CostGuard {
            q,
            limit: NAIVE_COST_GUARD,
            what: "the quadratic per-character method",
        });
    }
    Ok(())
}

/// `log |L(1, chi_j)|` for every `j`, one character at a time with no FFT.
/// Entry 0 (the principal character) is NaN.
pub fn naive_log_abs_l1(field: &PrimeField) -> Result<Vec<f64>> {
    Ok(naive_parts(field)?.0)
}

fn naive_parts(field: &PrimeField) -> Result<(Vec<f64>, f64, f64)> {
    let q = field.q();
    check_naive_guard(q)?;
    let n = field.order();
    let roots = root_table(n);
    let lin: Vec<f64> = field.powers().iter().map(|&a| a as f64 / q as f64).collect();
    let lg: Vec<f64> = field
        .powers()
        .iter()
        .map(|&a| log_gamma_unchecked(a as f64 / q as f64))
        .collect();
    let l1_lin: f64 = lin.iter().sum();
    let l1_lg: f64 = lg.iter().map(|v| v.abs()).sum();
    let mut out = vec![f64::NAN; n];
    let (mut err_odd, mut err_even) = (0.0, 0.0);
    for (j, slot) in out.iter_mut().enumerate().skip(1) {
        let (x, pre, l1) = if j % 2 == 1 {
            (&lin, odd_prefactor(q), l1_lin)
        } else {
            (&lg, even_prefactor(q), l1_lg)
        };
        let m = direct_char_sum(x, &roots, j).norm();
        if !(m > DEGENERACY_FLOOR) {
            return Err(Error::NumericalDegeneracy {
                q,
                index: j,
                magnitude: m,
            });
        }
        *slot = pre + m.ln();
        let e = ERR_CONST * f64::EPSILON * l1 / m + f64::EPSILON * slot.abs();
        if j % 2 == 1 {
            err_odd += e;
        } else {
            err_even += e;
        }
    }
    Ok((out, err_odd, err_even))
}

/// `log R(q)` from per-character sums in `O(q^2)`; refuses `q > 10^5`.
pub fn log_ratio_naive(field: &PrimeField) -> Result<RatioRecord> {
    let q = field.q();
    let (per_char, err_odd, err_even) = naive_parts(field)?;
    let mut odd = NeumaierSum::new();
    let mut even = NeumaierSum::new();
    for (j, v) in per_char.iter().enumerate().skip(1) {
        if j % 2 == 1 {
            odd += *v;
        } else {
            even += *v;
        }
    }
    Ok(RatioRecord::new(
        q,
        Part {
            value: odd.value(),
            err: err_odd,
        },
        Part {
            value: even.value(),
            err: err_even,
        },
        Method::Naive,
    ))
}

/// `log H(q)` with `H(q) = 2 sqrt(q) (q / 2 pi)^{(q-1)/2}`.
pub fn log_h(q: u64) -> f64 {
    let lq = (q as f64).ln();
    let mut s = NeumaierSum::new();
    s += LN_2;
    s += 0.5 * lq;
    s += 0.5 * (q - 1) as f64 * lq;
    s += -0.5 * (q - 1) as f64 * (2.0 * PI).ln();
    s.value()
}

/// `log(h(q) Reg(q)) = log R(q) + log H(q)`.
pub fn log_hreg(record: &RatioRecord) -> f64 {
    record.log_r + log_h(record.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::{build_field, sieve_primes};

    fn field(q: u64) -> PrimeField {
        build_field(q).unwrap()
    }

    #[test]
    fn q3_closed_forms() {
        let f = field(3);
        let want = (PI / (3.0 * 3f64.sqrt())).ln();
        assert!((want + 0.503_188_547).abs() < 1e-9);
        assert!((odd_log_sum(&f).unwrap() - want).abs() < 1e-15);
        assert_eq!(even_log_sum(&f).unwrap(), 0.0);
        for rec in [
            log_ratio_fft(&f).unwrap(),
            log_ratio_naive(&f).unwrap(),
            log_ratio_digamma(&f).unwrap(),
        ] {
            assert!((rec.log_r - want).abs() < 1e-12, "{:?}", rec.method);
        }
        let rec = log_ratio_fft(&f).unwrap();
        assert!((rec.r - 0.604_599_788).abs() < 1e-9);
        assert!((rec.r * log_h(3).exp() - 1.0).abs() < 1e-12);
        assert!(log_hreg(&rec).abs() < 1e-12);
    }

    #[test]
    fn log_h_q3() {
        let want = (3.0 * 3f64.sqrt() / PI).ln();
        assert!((log_h(3) - want).abs() < 1e-15);
        assert!((want - 0.503_188_547).abs() < 1e-9);
    }

    #[test]
    fn log_h_increasing() {
        let vals: Vec<f64> = sieve_primes(1000).into_iter().skip(1).map(log_h).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn q5_parts_match_naive() {
        let f = field(5);
        let fast = log_ratio_fft(&f).unwrap();
        let slow = log_ratio_naive(&f).unwrap();
        assert!((fast.odd_part - slow.odd_part).abs() < 1e-12);
        assert!((fast.even_part - slow.even_part).abs() < 1e-12);
        // the even part is log L(1, chi_2) for the quadratic character mod 5:
        // L(1, (./5)) = 2 log(golden ratio) / sqrt 5
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let want = (2.0 * phi.ln() / 5f64.sqrt()).ln();
        assert!((fast.even_part - want).abs() < 1e-12);
    }

    #[test]
    fn cross_method_agreement_small() {
        for q in [7u64, 23, 101, 163] {
            let f = field(q);
            let a = log_ratio_fft(&f).unwrap();
            let b = log_ratio_naive(&f).unwrap();
            let c = log_ratio_digamma(&f).unwrap();
            assert!((a.log_r - b.log_r).abs() < 1e-10, "q={q}");
            assert!((a.log_r - c.log_r).abs() < 1e-10, "q={q}");
            assert!((b.log_r - c.log_r).abs() < 1e-10, "q={q}");
            assert!((a.odd_part - c.odd_part).abs() < 1e-10);
            assert!((a.even_part - c.even_part).abs() < 1e-10);
        }
        let f = field(1009);
        let a = log_ratio_fft(&f).unwrap();
        let c = log_ratio_digamma(&f).unwrap();
        assert!((a.log_r - c.log_r).abs() < 1e-9);
    }

    #[test]
    fn decimation_paths_agree() {
        for q in sieve_primes(3000).into_iter().skip(1).step_by(7) {
            let f = field(q);
            let a = log_ratio_fft_with(&f, Decimation::IndexFilter).unwrap();
            let b = log_ratio_fft_with(&f, Decimation::HalfLength).unwrap();
            assert!((a.odd_part - b.odd_part).abs() < 1e-12, "q={q}");
            assert!((a.even_part - b.even_part).abs() < 1e-12, "q={q}");
        }
    }

    #[test]
    fn record_invariants() {
        for q in [3u64, 5, 11, 97, 1999] {
            let rec = log_ratio_fft(&field(q)).unwrap();
            assert_eq!(rec.log_r, rec.odd_part + rec.even_part);
            assert_eq!(rec.r, rec.log_r.exp());
            assert!(rec.r > 0.0 && rec.err_est > 0.0);
        }
    }

    #[test]
    fn naive_cost_guard() {
        let f = field(100_003);
        assert!(matches!(log_ratio_naive(&f), Err(Error::CostGuard { .. })));
    }

    #[test]
    fn hreg_q5_is_twice_log_golden_ratio() {
        // h(5) = 1 and the fundamental unit is the golden ratio; with both
        // complex places weighted by 2 the regulator is 2 log(phi) = 0.962,
        // so the regulator is positive while its logarithm is not
        let rec = log_ratio_naive(&field(5)).unwrap();
        let v = log_hreg(&rec);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(v.exp() > 0.0);
        assert!((v - (2.0 * phi.ln()).ln()).abs() < 1e-12);
        assert!((log_hreg(&log_ratio_fft(&field(5)).unwrap()) - v).abs() < 1e-12);
    }
}
