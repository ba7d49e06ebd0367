use std::sync::OnceLock;

use super::{domain_err, BERNOULLI_EVEN};
use crate::ntheory::{moebius, sieve_primes};
use crate::sum::NeumaierSum;
use crate::Result;

/// Terms summed directly before the Euler-Maclaurin tail.
const EM_HEAD: u32 = 20;
/// Bernoulli corrections in the tail.
const EM_CORRECTIONS: usize = 8;

/// `scale^{-s} * zeta(s, x)`, i.e. `sum_{k>=0} (scale*(k + x))^{-s}`.
///
/// With `scale = q` and `x = a/q` this is `sum_k (a + kq)^{-s}` without ever
/// forming `q^s`, which overflows for the larger `s` the verifier needs.
/// No argument checks: `s > 1`, `x > 0`, `scale > 0` are the caller's job.
pub fn hurwitz_zeta_scaled(s: f64, x: f64, scale: f64) -> f64 {
    let mut head = NeumaierSum::new();
    for k in 0..EM_HEAD {
        head += (scale * (k as f64 + x)).powf(-s);
    }
    let y = EM_HEAD as f64 + x;
    let base = (scale * y).powf(-s);
    // integral + half endpoint
    let mut tail = NeumaierSum::new();
    tail += base * y / (s - 1.0);
    tail += 0.5 * base;
    // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * y^{1-2j}, relative to base
    let mut rising = s / y;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI_EVEN.iter().take(EM_CORRECTIONS).enumerate() {
        tail += base * b / fact * rising;
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m) / (y * y);
        fact *= (m + 1.0) * (m + 2.0);
    }
    head.value() + tail.value()
}

/// Hurwitz zeta `zeta(n, x) = sum_{k>=0} (k + x)^{-n}` for integer `n >= 2`
/// and `0 < x <= 1`.
pub fn hurwitz_zeta(n: u32, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain_err("hurwitz_zeta", n as f64, "n >= 2"));
    }
    if !(x > 0.0 && x <= 1.0) {
        return Err(domain_err("hurwitz_zeta", x, "0 < x <= 1"));
    }
    Ok(hurwitz_zeta_scaled(n as f64, x, 1.0))
}

const ZM1_CACHE: usize = 64;

fn zm1_table() -> &'static [f64; ZM1_CACHE] {
    static TABLE: OnceLock<[f64; ZM1_CACHE]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; ZM1_CACHE];
        for (n, v) in t.iter_mut().enumerate().skip(2) {
            *v = hurwitz_zeta_scaled(n as f64, 2.0, 1.0);
        }
        t
    })
}

/// `zeta(n) - 1` for `n >= 2`, accurate to full relative precision even
/// when it is tiny.
pub fn zeta_minus_one(n: u32) -> f64 {
    assert!(n >= 2, "zeta(n) - 1 needs n >= 2");
    if (n as usize) < ZM1_CACHE {
        zm1_table()[n as usize]
    } else {
        hurwitz_zeta_scaled(n as f64, 2.0, 1.0)
    }
}

/// Riemann zeta at an integer `n >= 2`.
pub fn riemann_zeta(n: u32) -> f64 {
    1.0 + zeta_minus_one(n)
}

/// Primes below this are summed directly in [`prime_zeta`].
const PRIME_ZETA_CUTOFF: u64 = 100;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(PRIME_ZETA_CUTOFF))
}

/// `log zeta_X(n) = log zeta(n) + sum_{p <= X} log(1 - p^{-n})`, the log of
/// the Euler product over primes above `X`.
fn log_zeta_truncated(n: u32, primes: &[u64]) -> f64 {
    let mut acc = NeumaierSum::new();
    acc += zeta_minus_one(n).ln_1p();
    for &p in primes {
        acc += (-(p as f64).powi(-(n as i32))).ln_1p();
    }
    acc.value()
}

/// Prime zeta function `P(s) = sum_p p^{-s}` at an integer `s >= 2`.
///
/// Primes up to 100 are summed directly; the rest comes from Möbius
/// inversion of the truncated Euler product,
/// `sum_{p > X} p^{-s} = sum_k mu(k)/k log zeta_X(ks)`, whose terms are
/// bounded by `X^{1-ks}/(ks-1)`.
pub fn prime_zeta(s: u32) -> f64 {
    assert!(s >= 2, "prime zeta needs s >= 2");
    let primes = small_primes();
    let x = PRIME_ZETA_CUTOFF as f64;
    let mut acc = NeumaierSum::new();
    for &p in primes {
        acc += (p as f64).powi(-(s as i32));
    }
    for k in 1u32.. {
        let n = k * s;
        let bound = x.powf(1.0 - n as f64) / (n as f64 - 1.0);
        if bound < 1e-22 {
            break;
        }
        let mu = moebius(k as u64);
        if mu != 0 {
            acc += mu as f64 / k as f64 * log_zeta_truncated(n, primes);
        }
    }
    acc.value()
}
