//! log Gamma and digamma on the positive real axis.
//!
//! Near 1 both come from the Taylor series of `log Gamma(1 + z)` written in
//! terms of `zeta(k) - 1`, which converges like `(|z|/2)^k`; the recurrence
//! moves arguments in `(1.5, 12)` down into `[0.5, 1.5]`, and Stirling's
//! series takes over above 12.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{domain_err, zeta_minus_one, BERNOULLI_EVEN, EULER_GAMMA};
use crate::Result;

const TAYLOR_TERMS: usize = 42;
const ASYMPTOTIC_FROM: f64 = 12.0;

/// `(-1)^k (zeta(k) - 1)` for `k` in `2..TAYLOR_TERMS`.
fn taylor_coeffs() -> &'static [f64; TAYLOR_TERMS] {
    static C: OnceLock<[f64; TAYLOR_TERMS]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [0.0; TAYLOR_TERMS];
        for (k, v) in c.iter_mut().enumerate().skip(2) {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *v = sign * zeta_minus_one(k as u32);
        }
        c
    })
}

/// `log Gamma(1 + z)` for `|z| <= 1/2`.
fn log_gamma_1p(z: f64) -> f64 {
    let c = taylor_coeffs();
    let mut poly = 0.0;
    for k in (2..TAYLOR_TERMS).rev() {
        poly = poly * z + c[k] / k as f64;
    }
    // poly * z^2 collects the k >= 2 terms
    -z.ln_1p() + z * (1.0 - EULER_GAMMA) + poly * z * z
}

/// `psi(1 + z)` for `|z| <= 1/2`.
fn digamma_1p(z: f64) -> f64 {
    let c = taylor_coeffs();
    let mut poly = 0.0;
    for k in (2..TAYLOR_TERMS).rev() {
        poly = poly * z + c[k];
    }
    -1.0 / (1.0 + z) + (1.0 - EULER_GAMMA) + poly * z
}

fn log_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for (k, b) in BERNOULLI_EVEN.iter().take(8).enumerate() {
        let m = 2.0 * (k as f64 + 1.0);
        series += b / (m * (m - 1.0)) * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

fn digamma_asymptotic(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut pow = inv2;
    for (k, b) in BERNOULLI_EVEN.iter().take(8).enumerate() {
        let m = 2.0 * (k as f64 + 1.0);
        series += b / m * pow;
        pow *= inv2;
    }
    x.ln() - 0.5 / x - series
}

/// `log Gamma(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain_err("log_gamma", x, "0 < x < inf"));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        log_gamma_1p(x) - x.ln()
    } else if x <= 1.5 {
        log_gamma_1p(x - 1.0)
    } else if x < ASYMPTOTIC_FROM {
        let mut y = x;
        let mut prod = 1.0;
        while y > 1.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + log_gamma_1p(y - 1.0)
    } else {
        log_gamma_stirling(x)
    }
}

/// Digamma `psi(x) = Gamma'(x)/Gamma(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain_err("digamma", x, "0 < x < inf"));
    }
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        digamma_1p(x) - 1.0 / x
    } else if x <= 1.5 {
        digamma_1p(x - 1.0)
    } else if x < ASYMPTOTIC_FROM {
        let mut y = x;
        let mut recip = 0.0;
        while y > 1.5 {
            y -= 1.0;
            recip += 1.0 / y;
        }
        digamma_1p(y - 1.0) + recip
    } else {
        digamma_asymptotic(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::sum_compensated;
    use proptest::prelude::*;

    #[test]
    fn log_gamma_special_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        let half = log_gamma(0.5).unwrap();
        assert!((half - 0.5 * PI.ln()).abs() < 4.0 * f64::EPSILON);
        // log Gamma(1/3) + log Gamma(2/3) = log(2 pi / sqrt 3)
        let refl = log_gamma(1.0 / 3.0).unwrap() + log_gamma(2.0 / 3.0).unwrap();
        assert!((refl - (2.0 * PI / 3f64.sqrt()).ln()).abs() < 1e-15);
        // log 10! via the asymptotic branch
        let want = (1..=10).map(|k| (k as f64).ln()).sum::<f64>();
        assert!((log_gamma(11.0).unwrap() - want).abs() < 1e-14);
        assert!((log_gamma(21.0).unwrap() - (1..=20).map(|k| (k as f64).ln()).sum::<f64>()).abs() < 1e-13);
    }

    #[test]
    fn log_gamma_near_one_is_ulp_accurate() {
        // Gamma(1 + z) ~ -gamma z near 0; relative, not just absolute
        let z = 1e-9;
        let got = log_gamma(1.0 + z).unwrap();
        let want = -EULER_GAMMA * z + 0.822_467_033_424_113_2 * z * z;
        assert!(((got - want) / want).abs() < 1e-6);
    }

    #[test]
    fn digamma_special_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-16);
        let half = digamma(0.5).unwrap();
        assert!((half - (-EULER_GAMMA - 2.0 * 2f64.ln())).abs() < 1e-15);
        // psi(n) = H_{n-1} - gamma
        let h9 = sum_compensated((1..10).map(|k| 1.0 / k as f64));
        let got = digamma(10.0).unwrap();
        assert!(((got - (h9 - EULER_GAMMA)) / got).abs() < 1e-15);
        let h99 = sum_compensated((1..100).map(|k| 1.0 / k as f64));
        assert!(((digamma(100.0).unwrap() - (h99 - EULER_GAMMA)) / h99).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        for x in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(log_gamma(x).is_err());
            assert!(digamma(x).is_err());
        }
    }

    #[test]
    fn log_gamma_continuous_at_branch_points() {
        for b in [0.5, 1.5, ASYMPTOTIC_FROM] {
            let lo = log_gamma_unchecked(b - 1e-12);
            let hi = log_gamma_unchecked(b + 1e-12);
            assert!((lo - hi).abs() < 1e-11);
            let lo = digamma_unchecked(b - 1e-12);
            let hi = digamma_unchecked(b + 1e-12);
            assert!((lo - hi).abs() < 1e-11);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn reflection(x in 1e-6f64..(1.0 - 1e-6)) {
            let lhs = log_gamma(x).unwrap() + log_gamma(1.0 - x).unwrap();
            let rhs = (PI / (PI * x).sin()).ln();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn digamma_recurrence(x in 1e-3f64..10.0) {
            let lhs = digamma(x + 1.0).unwrap();
            let rhs = digamma(x).unwrap() + 1.0 / x;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn log_gamma_recurrence(x in 1e-3f64..30.0) {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = log_gamma(x).unwrap() + x.ln();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + lhs.abs()));
        }
    }
}
