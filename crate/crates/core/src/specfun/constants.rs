use std::sync::OnceLock;

use super::gamma::digamma_unchecked;
use super::{prime_zeta, EULER_GAMMA};
use crate::sum::NeumaierSum;

/// Numeric constants used throughout the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsTable {
    pub gamma_euler: f64,
    pub meissel_mertens: f64,
    pub a_const: f64,
    pub c1_const: f64,
    pub k_opt: u64,
}

/// The process-wide constants table, computed once.
pub fn constants() -> &'static ConstantsTable {
    static TABLE: OnceLock<ConstantsTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let (k_opt, c1_const) = minimize_c1();
        ConstantsTable {
            gamma_euler: EULER_GAMMA,
            meissel_mertens: meissel_mertens(),
            a_const: constant_a(),
            c1_const,
            k_opt,
        }
    })
}

/// Summation cutoff for [`constant_a`].
pub const A_CUTOFF: u64 = 1_000_000;

/// The constant `A = sum_{m>=2} (1/m) sum_{k=alpha(m)}^{beta(m)} 1/k`,
/// `alpha(m) = (m^2-m)/2`, `beta(m) = (m^2+m)/2 - 1`.
pub fn constant_a() -> f64 {
    constant_a_with_cutoff(A_CUTOFF)
}

/// `A = gamma/2 + (1/2) sum_{j>=3} psi(alpha(j))/alpha(j)`, summed exactly
/// for `j <= cutoff` and closed with an asymptotic tail.
///
/// The tail uses `psi(x) = log x - 1/(2x) + O(x^-2)` expanded in `1/j`
/// and integrated term by term, plus the Euler-Maclaurin endpoint terms.
/// Neglected terms are `O(log J / J^5)`.
pub fn constant_a_with_cutoff(cutoff: u64) -> f64 {
    assert!(cutoff >= 100, "cutoff too small for the asymptotic tail");
    let g = |j: u64| {
        let a = (j * (j - 1) / 2) as f64;
        digamma_unchecked(a) / a
    };
    let head: NeumaierSum = (3..=cutoff).map(g).collect();

    let big_j = cutoff as f64;
    let log_j = big_j.ln();
    let ln2 = std::f64::consts::LN_2;
    // int_J^inf log(t) t^-k dt and int_J^inf t^-k dt
    let il = |k: i32| big_j.powi(1 - k) * (log_j / (k - 1) as f64 + 1.0 / ((k - 1) * (k - 1)) as f64);
    let ip = |k: i32| big_j.powi(1 - k) / (k - 1) as f64;
    // g(t) = 2(2 log t - log 2)(t^-2 + t^-3 + t^-4 + t^-5) - 2 t^-3 - 5 t^-4 - (23/3) t^-5
    let mut integral = NeumaierSum::new();
    for k in 2..=5 {
        integral += 4.0 * il(k) - 2.0 * ln2 * ip(k);
    }
    integral += -2.0 * ip(3) - 5.0 * ip(4) - 23.0 / 3.0 * ip(5);
    let g_j = g(cutoff);
    let dg_j = 0.5 * (g(cutoff + 1) - g(cutoff - 1));
    let tail = integral.value() - 0.5 * g_j - dg_j / 12.0;

    let mut total = NeumaierSum::new();
    total += 0.5 * EULER_GAMMA;
    total += 0.5 * head.value();
    total += 0.5 * tail;
    total.value()
}

/// `c1(k) = H_{(k-1)/2}/4 - log log k` for odd `k >= 3`.
pub fn c1(k: u64) -> f64 {
    assert!(k >= 3 && k % 2 == 1, "c1 is defined for odd k >= 3");
    let h: NeumaierSum = (1..=(k - 1) / 2).map(|j| 1.0 / j as f64).collect();
    0.25 * h.value() - (k as f64).ln().ln()
}

/// Upper end of the search range in [`minimize_c1`].
pub const C1_SEARCH_LIMIT: u64 = 10_000;

/// The odd `k` in `[3, 10^4]` minimising `c1(k)`, with the minimum.
pub fn minimize_c1() -> (u64, f64) {
    let mut harmonic = NeumaierSum::new();
    let mut best = (3, f64::INFINITY);
    for k in (3..=C1_SEARCH_LIMIT).step_by(2) {
        harmonic += 1.0 / ((k - 1) / 2) as f64;
        let v = 0.25 * harmonic.value() - (k as f64).ln().ln();
        if v < best.1 {
            best = (k, v);
        }
    }
    best
}

/// The Meissel-Mertens constant `gamma - sum_p sum_{m>=2} 1/(m p^m)`,
/// via prime zeta values: `gamma - sum_{m>=2} P(m)/m`.
pub fn meissel_mertens() -> f64 {
    let mut s = NeumaierSum::new();
    s += EULER_GAMMA;
    for m in 2u32..=80 {
        s += -prime_zeta(m) / m as f64;
    }
    s.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::sieve_primes;
    use crate::specfun::exp_integral_e1;

    #[test]
    fn a_matches_published_digits() {
        let a = constant_a();
        assert!((a - 1.600_088_343_8).abs() < 1e-9, "A = {a:.15}");
    }

    #[test]
    fn a_is_insensitive_to_cutoff() {
        let a6 = constant_a_with_cutoff(1_000_000);
        for j in [10_000, 100_000] {
            let a = constant_a_with_cutoff(j);
            assert!((a - a6).abs() < 1e-12, "J={j}: {a} vs {a6}");
        }
    }

    #[test]
    fn a_double_sum_matches_digamma_form() {
        // finite double sum to m = M equals the digamma partial sum to
        // j = M+1 plus the boundary term psi(alpha(M+1))/(M+1)
        let m_max = 2000u64;
        let mut double = NeumaierSum::new();
        for m in 2..=m_max {
            let lo = m * (m - 1) / 2;
            let hi = m * (m + 1) / 2 - 1;
            let inner: NeumaierSum = (lo..=hi).map(|k| 1.0 / k as f64).collect();
            double += inner.value() / m as f64;
        }
        let alpha = |j: u64| (j * (j - 1) / 2) as f64;
        let mut dig = NeumaierSum::new();
        dig += 0.5 * EULER_GAMMA;
        let mut partials = Vec::new();
        for j in 3..=m_max + 1 {
            dig += 0.5 * digamma_unchecked(alpha(j)) / alpha(j);
            partials.push(dig.value());
        }
        dig += digamma_unchecked(alpha(m_max + 1)) / (m_max + 1) as f64;
        assert!((double.value() - dig.value()).abs() < 1e-12);
        assert!(partials.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn c1_minimum_at_55() {
        let (k, v) = minimize_c1();
        assert_eq!(k, 55);
        assert!(v < -0.415_261_790_6);
        assert!((v - c1(55)).abs() < 1e-15);
        assert!(c1(3) > c1(55));
    }

    #[test]
    fn meissel_mertens_digits() {
        let m = meissel_mertens();
        assert!((m - 0.261_497_212_847_642_8).abs() < 1e-14, "{m:.17}");
    }

    #[test]
    fn meissel_mertens_log_form_agrees() {
        // gamma + sum_p (log(1 - 1/p) + 1/p), primes to 10^7, tail from the
        // prime number theorem: sum_{p > X} p^-m ~ E1((m-1) log X)
        let x = 10_000_000u64;
        let mut s = NeumaierSum::new();
        s += EULER_GAMMA;
        for p in sieve_primes(x) {
            let u = 1.0 / p as f64;
            s += (-u).ln_1p() + u;
        }
        let lx = (x as f64).ln();
        for m in 2..6 {
            s += -exp_integral_e1((m - 1) as f64 * lx).unwrap() / m as f64;
        }
        assert!((s.value() - meissel_mertens()).abs() < 1e-10);
    }

    #[test]
    fn table_is_cached_and_consistent() {
        let t = constants();
        assert!(std::ptr::eq(t, constants()));
        assert_eq!(t.k_opt, 55);
        assert!((t.a_const - 1.600_088_343_8).abs() < 1e-9);
        assert!((t.meissel_mertens - 0.261_497_212_8).abs() < 1e-10);
        assert_eq!(t.a_const, constant_a());
    }
}
