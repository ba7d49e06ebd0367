//! An independent route to `log R(q)` through truncated Euler products.
//!
//! With `L_P(s, chi) = prod_{p > P} (1 - chi(p) p^{-s})^{-1}`,
//!
//! ```text
//! log R(q) = -sum_chi sum_{p <= P} log(1 - chi(p)/p)
//!          + sum_chi sum_{m >= 1} (1/m) sum_{k >= 1} (mu(k)/k) log L_P(km, chi^{km}),
//! ```
//!
//! truncated at `m <= M`, `k <= K` with explicit bounds on what is dropped.
//! Only the single `km = 1` term needs `L(1, chi)`, which is taken from the
//! per-character path of [`crate::ratio`]. Splitting the same expansion into
//! primes (`m = 1`) and prime powers (`m >= 2`) gives `Sigma_1` and
//! `Sigma_2`.
//!
//! Sums over all characters of functions of `chi(p)` collapse by
//! orthogonality: if `p` has order `d` mod `q`, then
//! `sum_chi log(1 - chi(p) z) = ((q-1)/d) log(1 - z^d)`.

use std::collections::HashMap;
use std::f64::consts::{LN_10, LN_2, PI};

use num_complex::Complex64;

use crate::bounds::lemma1_bound;
use crate::error::{Error, Result};
use crate::fft::{self, DftPlan};
use crate::ntheory::{build_field, moebius, sieve_primes, PrimeField};
use crate::ratio::{log_ratio_fft, naive_log_abs_l1, RatioRecord};
use crate::specfun::{constants, hurwitz_zeta_scaled, prime_zeta, EULER_GAMMA};
use crate::sum::{ComplexNeumaierSum, NeumaierSum};

pub const DEFAULT_A: u64 = 20;
pub const DEFAULT_DELTA: u32 = 8;
/// Largest modulus accepted by the verifier.
pub const VERIFY_COST_GUARD: u64 = 5000;

/// Truncation parameters for the Euler-product expansion, with the bounds
/// on the two truncation errors.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationPlan {
    pub a: u64,
    /// `P = A q`.
    pub p: u64,
    /// Largest prime-power exponent `m`.
    pub m: u32,
    /// Largest Möbius index `k`.
    pub k: u32,
    pub delta: u32,
    /// Bound on the terms with `m > M`.
    pub e1_bound: f64,
    /// Bound on the terms with `m <= M`, `k > K`.
    pub e2_bound: f64,
}

impl TruncationPlan {
    pub fn total_bound(&self) -> f64 {
        self.e1_bound + self.e2_bound
    }
}

/// `log` of `P(q-1) / (M(M-1)(P-1)P^M)`.
fn log_e1(q: u64, p: u64, m: u32) -> f64 {
    let pf = p as f64;
    let lp = pf.ln();
    let mf = m as f64;
    lp + ((q - 1) as f64).ln() - mf.ln() - (mf - 1.0).ln() - (pf - 1.0).ln() - mf * lp
}

/// `log` of `2P(q-1) / (K^2 (P-1)(P^K - 1))`.
fn log_e2(q: u64, p: u64, k: u32) -> f64 {
    let pf = p as f64;
    let lp = pf.ln();
    let kf = k as f64;
    let log_pk_minus_one = kf * lp + (-(-kf * lp).exp()).ln_1p();
    LN_2 + lp + ((q - 1) as f64).ln() - 2.0 * kf.ln() - (pf - 1.0).ln() - log_pk_minus_one
}

/// Smallest `M >= 2`, then smallest `K >= 1`, with each bound below
/// `10^{-delta}/2`.
pub fn choose_plan(q: u64, a: u64, delta: u32) -> Result<TruncationPlan> {
    if q < 3 {
        return Err(Error::NotOddPrime(q));
    }
    if a == 0 || delta == 0 {
        return Err(Error::Input(format!(
            "A = {a} and delta = {delta} must both be positive"
        )));
    }
    let p = a * q;
    let target = -(delta as f64) * LN_10 - LN_2;
    let mut m = 2;
    while log_e1(q, p, m) >= target {
        m += 1;
    }
    let mut k = 1;
    while log_e2(q, p, k) >= target {
        k += 1;
    }
    Ok(TruncationPlan {
        a,
        p,
        m,
        k,
        delta,
        e1_bound: log_e1(q, p, m).exp(),
        e2_bound: log_e2(q, p, k).exp(),
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `Re log(1 + d)` for complex `d`, accurate when `d` is small.
fn re_log_1p(d: Complex64) -> f64 {
    0.5 * (2.0 * d.re + d.norm_sqr()).ln_1p()
}

/// `log(1 + d)` on the principal branch, accurate when `d` is small.
fn log_1p(d: Complex64) -> Complex64 {
    Complex64::new(re_log_1p(d), d.im.atan2(1.0 + d.re))
}

/// `p^{-x}`, flushed to zero instead of underflowing slowly.
fn inv_pow(ln_p: f64, x: f64) -> f64 {
    (-x * ln_p).exp()
}

/// Truncated `L`-values `L_P(n, chi)` for one modulus and cutoff, with the
/// spectra of `L(n, chi) - 1` cached per `n`.
pub struct TruncatedL<'a> {
    field: &'a PrimeField,
    p_cut: u64,
    /// Primes `p <= P` other than `q`, with `log p` and `dlog p`.
    primes: Vec<(u64, f64, u64)>,
    plan: DftPlan,
    spectra: HashMap<u32, Vec<Complex64>>,
}

impl<'a> TruncatedL<'a> {
    pub fn new(field: &'a PrimeField, p_cut: u64) -> Result<Self> {
        if p_cut < 2 {
            return Err(Error::Input(format!("prime cutoff P = {p_cut} must be at least 2")));
        }
        let q = field.q();
        let primes = sieve_primes(p_cut)
            .into_iter()
            .filter(|&p| p != q)
            .map(|p| (p, (p as f64).ln(), field.dlog(p % q) as u64))
            .collect();
        Ok(TruncatedL {
            field,
            p_cut,
            primes,
            plan: DftPlan::new(field.order()),
            spectra: HashMap::new(),
        })
    }

    pub fn p_cut(&self) -> u64 {
        self.p_cut
    }

    fn order(&self) -> u64 {
        self.field.order() as u64
    }

    /// `L(n, chi_j) - 1` for every `j`, from
    /// `L(n, chi) = sum_a chi(a) sum_{k>=0} (a + kq)^{-n}` with the leading
    /// `1^{-n}` removed before the transform.
    fn l_minus_one(&mut self, n: u32) -> &[Complex64] {
        let field = self.field;
        let plan = &self.plan;
        self.spectra.entry(n).or_insert_with(|| {
            let q = field.q() as f64;
            let s = n as f64;
            let mut x = fft::sample_by_dlog(field, |a| {
                if a == 1 {
                    hurwitz_zeta_scaled(s, 1.0 + 1.0 / q, q)
                } else {
                    hurwitz_zeta_scaled(s, a as f64 / q, q)
                }
            });
            fft::spectrum_from_samples(plan, field.q(), &mut x).sums().to_vec()
        })
    }

    fn tail_bound(&self, n: u32) -> f64 {
        inv_pow((self.p_cut as f64).ln(), n as f64 - 1.0) / (n as f64 - 1.0)
    }

    /// `log L_P(n, chi_j)` on the principal branch, for `n >= 2`, `j != 0`.
    pub fn log_l_p(&mut self, n: u32, j: usize) -> Result<Complex64> {
        if n < 2 {
            return Err(Error::Domain {
                func: "truncated_log_l",
                arg: n as f64,
                domain: "n >= 2",
            });
        }
        let order = self.order();
        if j == 0 {
            return Err(Error::PrincipalCharacter);
        }
        if j as u64 >= order {
            return Err(Error::Input(format!(
                "character index {j} out of range mod {}",
                self.field.q()
            )));
        }
        let delta = self.l_minus_one(n)[j];
        let mut acc = ComplexNeumaierSum::new();
        let head = log_1p(delta);
        acc += head;
        let mut magnitude = head.norm();
        for &(_, ln_p, t) in &self.primes {
            let z = inv_pow(ln_p, n as f64);
            if z == 0.0 {
                break;
            }
            let phase = (j as u64 * t) % order;
            let (s, c) = (2.0 * PI * phase as f64 / order as f64).sin_cos();
            let w = Complex64::new(-z * c, -z * s);
            let term = log_1p(w);
            magnitude += term.norm();
            acc += term;
        }
        let value = acc.value();
        let bound = self.tail_bound(n);
        if value.norm() > bound + 8.0 * f64::EPSILON * magnitude {
            return Err(Error::TruncationBound {
                q: self.field.q(),
                n,
                index: j,
                value: value.norm(),
                bound,
            });
        }
        Ok(value)
    }

    /// `sum_{chi != chi_0} Re log L_P(n, chi^n)`.
    ///
    /// Characters whose `n`-th power is principal contribute
    /// `log zeta(n) + sum_{p <= P} log(1 - p^{-n})`.
    pub fn char_sum(&mut self, n: u32) -> Result<f64> {
        assert!(n >= 2, "char_sum needs n >= 2");
        let order = self.order();
        let mut total = NeumaierSum::new();
        let mut magnitude = 0.0;
        {
            let spec = self.l_minus_one(n);
            let step = n as u64 % order;
            let mut idx = step;
            for _ in 1..order {
                let v = re_log_1p(spec[idx as usize]);
                total += v;
                magnitude += v.abs();
                idx += step;
                if idx >= order {
                    idx -= order;
                }
            }
        }
        for &(_, ln_p, t) in &self.primes {
            let z = inv_pow(ln_p, n as f64);
            if z == 0.0 {
                break;
            }
            let e = (n as u64 * t) % order;
            let d = order / gcd(e, order);
            let all = (order / d) as f64 * (-inv_pow(ln_p, (n as u64 * d) as f64)).ln_1p();
            let principal = (-z).ln_1p();
            total += all;
            total += -principal;
            magnitude += all.abs() + principal.abs();
        }
        let value = total.value();
        let bound = (order - 1) as f64 * self.tail_bound(n);
        if value.abs() > bound + 8.0 * f64::EPSILON * magnitude {
            return Err(Error::AggregateTruncationBound {
                q: self.field.q(),
                n,
                value,
                bound,
            });
        }
        Ok(value)
    }

    /// The `p <= P` parts of `Sigma_1` and `Sigma_2`:
    /// `sum_chi sum_{p<=P} chi(p)/p` and
    /// `sum_chi sum_{p<=P} Re(-log(1 - chi(p)/p) - chi(p)/p)`.
    fn head_parts(&self) -> (f64, f64) {
        let order = self.order();
        let n = order as f64;
        let mut s1 = NeumaierSum::new();
        let mut s2 = NeumaierSum::new();
        for &(p, ln_p, t) in &self.primes {
            let u = 1.0 / p as f64;
            let d = order / gcd(t, order);
            // log(1 - u) + u
            let lu = (-u).ln_1p() + u;
            if d == 1 {
                s1 += (n - 1.0) * u;
                s2 += -(n - 1.0) * lu;
            } else {
                s1 += -u;
                s2 += -((order / d) as f64) * (-inv_pow(ln_p, d as f64)).ln_1p() + lu;
            }
        }
        (s1.value(), s2.value())
    }

    /// `-sum_{chi != chi_0} sum_{p <= P} log(1 - chi(p)/p)`.
    pub fn head_sum(&self) -> f64 {
        let order = self.order();
        let mut acc = NeumaierSum::new();
        for &(p, ln_p, t) in &self.primes {
            let d = order / gcd(t, order);
            acc += -((order / d) as f64) * (-inv_pow(ln_p, d as f64)).ln_1p();
            acc += (-1.0 / p as f64).ln_1p();
        }
        acc.value()
    }

    /// `sum_{m in ms} (1/m) sum_{k in ks} (mu(k)/k) char_sum(km)`, skipping
    /// `km = 1`.
    fn moebius_block(&mut self, ms: std::ops::RangeInclusive<u32>, ks: std::ops::RangeInclusive<u32>) -> Result<f64> {
        let mut acc = NeumaierSum::new();
        for m in ms {
            for k in ks.clone() {
                let mu = moebius(k as u64);
                if mu == 0 || k * m == 1 {
                    continue;
                }
                let c = self.char_sum(k * m)?;
                acc += mu as f64 / (k as f64 * m as f64) * c;
            }
        }
        Ok(acc.value())
    }
}

/// `log L_P(n, chi_j)` for a single character; see [`TruncatedL`].
pub fn truncated_log_l(n: u32, j: usize, field: &PrimeField, p_cut: u64) -> Result<Complex64> {
    TruncatedL::new(field, p_cut)?.log_l_p(n, j)
}

/// `-sum_{chi != chi_0} sum_{p <= P} log(1 - chi(p)/p)` (real: conjugate
/// characters pair up).
pub fn head_sum(field: &PrimeField, p_cut: u64) -> Result<f64> {
    if p_cut < field.q() {
        return Err(Error::Input(format!("P = {p_cut} must be at least q = {}", field.q())));
    }
    Ok(TruncatedL::new(field, p_cut)?.head_sum())
}

fn check_l1(field: &PrimeField, log_abs_l1: &[f64]) -> Result<f64> {
    if log_abs_l1.len() != field.order() {
        return Err(Error::MissingL1Values {
            expected: field.order(),
            got: log_abs_l1.len(),
        });
    }
    let mut acc = NeumaierSum::new();
    for (j, v) in log_abs_l1.iter().enumerate().skip(1) {
        if !v.is_finite() {
            return Err(Error::Input(format!("log |L(1, chi_{j})| is not finite")));
        }
        acc += *v;
    }
    Ok(acc.value())
}

/// The truncated tail `sum_chi sum_{m<=M} (1/m) sum_{k<=K} (mu(k)/k)
/// Re log L_P(km, chi^{km})`, given `log |L(1, chi_j)|` for every `j`
/// (entry 0 ignored).
pub fn moebius_tail(field: &PrimeField, plan: &TruncationPlan, log_abs_l1: &[f64]) -> Result<f64> {
    let l1_total = check_l1(field, log_abs_l1)?;
    let mut tl = TruncatedL::new(field, plan.p)?;
    let mut acc = NeumaierSum::new();
    acc += l1_total;
    acc += -tl.head_sum();
    acc += tl.moebius_block(1..=plan.m, 1..=plan.k)?;
    Ok(acc.value())
}

/// `Sigma_1`, `Sigma_2` and their sum `log R(q)` from the Euler-product
/// expansion. `sigma1 + sigma2 == log_r_check` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaSplit {
    pub q: u64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub log_r_check: f64,
    pub plan: TruncationPlan,
}

impl SigmaSplit {
    fn new(q: u64, sigma1: f64, sigma2: f64, plan: TruncationPlan) -> Result<Self> {
        check_sigma2_bound(q, sigma2)?;
        Ok(SigmaSplit {
            q,
            sigma1,
            sigma2,
            log_r_check: sigma1 + sigma2,
            plan,
        })
    }
}

/// `|Sigma_2| <= A + (zeta(2) - A)/q`.
fn check_sigma2_bound(q: u64, sigma2: f64) -> Result<()> {
    let bound = lemma1_bound(q);
    if !(sigma2.abs() <= bound) {
        return Err(Error::BoundViolated {
            q,
            what: "|Sigma_2|",
            value: sigma2.abs(),
            bound,
        });
    }
    Ok(())
}

fn check_guard(q: u64) -> Result<()> {
    if q > VERIFY_COST_GUARD {
        return Err(Error::CostGuard {
            q,
            limit: VERIFY_COST_GUARD,
            what: "the Euler-product verifier",
        });
    }
    Ok(())
}

fn sigma2_with(tl: &mut TruncatedL, plan: &TruncationPlan) -> Result<f64> {
    let (_, head) = tl.head_parts();
    let mut acc = NeumaierSum::new();
    acc += head;
    if plan.m >= 2 {
        acc += tl.moebius_block(2..=plan.m, 1..=plan.k)?;
    }
    Ok(acc.value())
}

fn sigma1_with(tl: &mut TruncatedL, plan: &TruncationPlan, l1_total: f64) -> Result<f64> {
    let (head, _) = tl.head_parts();
    let mut acc = NeumaierSum::new();
    acc += head;
    // k = 1: sum_chi Re log L_P(1, chi)
    acc += l1_total;
    acc += -tl.head_sum();
    acc += tl.moebius_block(1..=1, 1..=plan.k)?;
    Ok(acc.value())
}

/// `log R(q)` from the truncated expansion, within `10^{-delta}` plus the
/// rounding error of the per-character `L(1, chi)` values.
pub fn verify_ratio(q: u64, a: u64, delta: u32) -> Result<SigmaSplit> {
    check_guard(q)?;
    let field = build_field(q)?;
    let plan = choose_plan(q, a, delta)?;
    let l1_total = check_l1(&field, &naive_log_abs_l1(&field)?)?;
    let mut tl = TruncatedL::new(&field, plan.p)?;
    let s1 = sigma1_with(&mut tl, &plan, l1_total)?;
    let s2 = sigma2_with(&mut tl, &plan)?;
    SigmaSplit::new(q, s1, s2, plan)
}

/// `Sigma_2`, the prime-power part of `log R(q)`, within `10^{-delta}`.
/// It needs no `L(1, chi)` values.
pub fn sigma2(q: u64, a: u64, delta: u32) -> Result<f64> {
    check_guard(q)?;
    let field = build_field(q)?;
    let plan = choose_plan(q, a, delta)?;
    let mut tl = TruncatedL::new(&field, plan.p)?;
    let s2 = sigma2_with(&mut tl, &plan)?;
    check_sigma2_bound(q, s2)?;
    Ok(s2)
}

/// `Sigma_1` computed directly and as `log R(q) - Sigma_2` from the given
/// record; fails if the two differ by more than `2 * 10^{-delta}` plus the
/// record's error estimate.
pub fn sigma1(record: &RatioRecord, a: u64, delta: u32) -> Result<SigmaSplit> {
    let q = record.q;
    check_guard(q)?;
    let field = build_field(q)?;
    let plan = choose_plan(q, a, delta)?;
    let l1_total = check_l1(&field, &naive_log_abs_l1(&field)?)?;
    let mut tl = TruncatedL::new(&field, plan.p)?;
    let s2 = sigma2_with(&mut tl, &plan)?;
    let direct = sigma1_with(&mut tl, &plan, l1_total)?;
    let indirect = record.log_r - s2;
    let tol = 2.0 * 10f64.powi(-(delta as i32)) + record.err_est;
    let diff = (direct - indirect).abs();
    if !(diff <= tol) {
        return Err(Error::VerificationFailed {
            q,
            what: "direct and indirect Sigma_1",
            diff,
            tol,
        });
    }
    SigmaSplit::new(q, direct, s2, plan)
}

/// The verifier's value next to the FFT value.
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub split: SigmaSplit,
    pub fft: RatioRecord,
    pub diff: f64,
    /// `10^{-delta} + err_est` of the FFT record.
    pub tolerance: f64,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.diff <= self.tolerance
    }
}

pub fn verify_against_fft(q: u64, a: u64, delta: u32) -> Result<Verification> {
    let split = verify_ratio(q, a, delta)?;
    let fft = log_ratio_fft(&build_field(q)?)?;
    let diff = (split.log_r_check - fft.log_r).abs();
    let tolerance = 10f64.powi(-(delta as i32)) + fft.err_est;
    Ok(Verification {
        split,
        fft,
        diff,
        tolerance,
    })
}

/// `M(q, 1)` from `Sigma_1 = (q-1) M(q, 1) - M + 1/q`.
pub fn mertens_m_q1(split: &SigmaSplit) -> f64 {
    let q = split.q as f64;
    (split.sigma1 + constants().meissel_mertens - 1.0 / q) / (q - 1.0)
}

/// `B(q) = -sum_{m>=2} (1/m) sum_{p != q} p^{-m}`, evaluated through the
/// prime zeta function.
pub fn mertens_b_q_series(q: u64) -> f64 {
    let lq = (q as f64).ln();
    let mut acc = NeumaierSum::new();
    for m in 2u32..=80 {
        acc += -(prime_zeta(m) - inv_pow(lq, m as f64)) / m as f64;
    }
    acc.value()
}

/// `B(q) = M - gamma - (log(1 - 1/q) + 1/q)`, checked against
/// [`mertens_b_q_series`] to `1e-10`.
pub fn mertens_b_q(q: u64) -> Result<f64> {
    let u = 1.0 / q as f64;
    let closed = constants().meissel_mertens - EULER_GAMMA - ((-u).ln_1p() + u);
    let series = mertens_b_q_series(q);
    let diff = (closed - series).abs();
    if !(diff <= 1e-10) {
        return Err(Error::VerificationFailed {
            q,
            what: "closed and series forms of B(q)",
            diff,
            tol: 1e-10,
        });
    }
    Ok(closed)
}
