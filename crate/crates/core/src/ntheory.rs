//! Primes, Möbius function, primitive roots and discrete logarithms.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Odd numbers covered by one sieve segment.
const SEGMENT_ODDS: usize = 1 << 15;

/// All primes `<= limit` in ascending order.
///
/// Segmented sieve over odd numbers only; memory is `O(sqrt(limit) + segment)`
/// on top of the output.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut primes = Vec::with_capacity(prime_count_estimate(limit));
    primes.push(2);
    if limit < 3 {
        return primes;
    }

    let root = isqrt(limit);
    let base = small_odd_primes(root);

    // Segment k covers the odd numbers lo, lo+2, ..., starting at lo = 3.
    let mut seg = vec![true; SEGMENT_ODDS];
    let mut lo = 3u64;
    while lo <= limit {
        let span = ((limit - lo) / 2 + 1).min(SEGMENT_ODDS as u64) as usize;
        let hi = lo + 2 * (span as u64 - 1);
        seg[..span].fill(true);
        for &p in &base {
            let p2 = p * p;
            if p2 > hi {
                break;
            }
            // first odd multiple of p that is >= max(lo, p^2)
            let mut start = if p2 >= lo { p2 } else { lo.div_ceil(p) * p };
            if start % 2 == 0 {
                start += p;
            }
            let mut i = ((start - lo) / 2) as usize;
            while i < span {
                seg[i] = false;
                i += p as usize;
            }
        }
        primes.extend(
            seg[..span]
                .iter()
                .enumerate()
                .filter(|(_, &is_p)| is_p)
                .map(|(i, _)| lo + 2 * i as u64),
        );
        lo = hi + 2;
    }
    primes
}

fn small_odd_primes(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

fn prime_count_estimate(x: u64) -> usize {
    if x < 17 {
        return 8;
    }
    let xf = x as f64;
    (1.26 * xf / xf.ln()) as usize
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for every `u64`.
///
/// Miller-Rabin with the first twelve prime bases, which has no
/// strong pseudoprimes below 3.3 * 10^24.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n` in ascending order, by trial division.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The Möbius function.
pub fn moebius(k: u64) -> i8 {
    assert!(k >= 1, "moebius is defined for k >= 1");
    let mut n = k;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn require_odd_prime(q: u64) -> Result<()> {
    if q < 3 || !is_prime(q) {
        return Err(Error::NotOddPrime(q));
    }
    Ok(())
}

/// Least primitive root modulo the odd prime `q`.
pub fn find_primitive_root(q: u64) -> Result<u64> {
    require_odd_prime(q)?;
    let cofactors: Vec<u64> = distinct_prime_factors(q - 1).into_iter().map(|r| (q - 1) / r).collect();
    (2..q)
        .find(|&g| cofactors.iter().all(|&e| pow_mod(g, e, q) != 1))
        .ok_or(Error::NotOddPrime(q))
}

/// An odd prime modulus with its least primitive root and discrete-log
/// tables.
///
/// Characters mod `q` are indexed by `j` in `0..q-1` through
/// `chi_j(g^k) = e(jk/(q-1))`, so every character sum over residues becomes
/// a sum over exponents `k`.
#[derive(Clone, Debug)]
pub struct PrimeField {
    q: u64,
    g: u64,
    /// `dlog[a] = k` with `g^k = a (mod q)`; entry 0 is unused.
    dlog: Vec<u32>,
    /// `powers[k] = g^k mod q` for `k` in `0..q-1`.
    powers: Vec<u32>,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        let g = find_primitive_root(q)?;
        if q > u32::MAX as u64 {
            return Err(Error::Input(format!("modulus {q} too large for the dlog tables")));
        }
        let n = (q - 1) as usize;
        let mut dlog = vec![u32::MAX; q as usize];
        let mut powers = Vec::with_capacity(n);
        let mut x = 1u64;
        for k in 0..n {
            powers.push(x as u32);
            dlog[x as usize] = k as u32;
            x = x * g % q;
        }
        debug_assert_eq!(x, 1);
        Ok(PrimeField { q, g, dlog, powers })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// The primitive root `g`.
    #[inline]
    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Order of the character group, `q - 1`.
    #[inline]
    pub fn order(&self) -> usize {
        (self.q - 1) as usize
    }

    /// Discrete logarithm of `a` to base `g`; `a` must be a unit mod `q`.
    #[inline]
    pub fn dlog(&self, a: u64) -> usize {
        let r = (a % self.q) as usize;
        debug_assert!(r != 0, "dlog of a non-unit");
        self.dlog[r] as usize
    }

    /// `g^k mod q`.
    #[inline]
    pub fn power(&self, k: usize) -> u64 {
        self.powers[k % self.order()] as u64
    }

    pub fn powers(&self) -> &[u32] {
        &self.powers
    }

    /// Discrete-log table indexed by residue; entry 0 is a sentinel.
    pub fn dlog_table(&self) -> &[u32] {
        &self.dlog
    }
}

/// Builds the [`PrimeField`] for `q`.
pub fn build_field(q: u64) -> Result<PrimeField> {
    PrimeField::new(q)
}

/// `sum_{p <= x} 1/p` with compensated summation.
pub fn prime_reciprocal_sum(x: f64) -> f64 {
    if !(x >= 2.0) {
        return 0.0;
    }
    let primes = sieve_primes(x.floor() as u64);
    reciprocal_sum_of(&primes, x)
}

/// `sum 1/p` over the primes in `primes` that are `<= x`.
pub fn reciprocal_sum_of(primes: &[u64], x: f64) -> f64 {
    primes
        .iter()
        .take_while(|&&p| p as f64 <= x)
        .map(|&p| 1.0 / p as f64)
        .collect::<NeumaierSum>()
        .value()
}
