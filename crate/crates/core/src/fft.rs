//! Arbitrary-length DFT and Dirichlet-character sums mod a prime.
//!
//! The forward transform is `X[j] = sum_k x[k] e(-jk/n)` with
//! `e(t) = exp(2 pi i t)`. Power-of-two lengths use an iterative radix-2
//! kernel; every other length goes through Bluestein's chirp-z reduction to
//! a power-of-two cyclic convolution of length `>= 2n - 1`. All twiddles
//! and chirps are evaluated directly from their exact integer phase, never
//! by recurrence.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ntheory::PrimeField;
use crate::sum::ComplexNeumaierSum;

/// A non-empty sequence of finite complex numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSeq {
    values: Vec<Complex64>,
}

impl ComplexSeq {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("empty sequence".into()));
        }
        if let Some(i) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Input(format!("non-finite entry at index {i}")));
        }
        Ok(ComplexSeq { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.values
    }
}

/// `e(-num/den)`, with the phase reduced exactly before scaling.
#[inline]
fn unit_root(num: u64, den: u64) -> Complex64 {
    let r = num % den;
    let (s, c) = (-2.0 * PI * r as f64 / den as f64).sin_cos();
    Complex64::new(c, s)
}

/// Quadratic-time DFT with compensated accumulation.
pub fn dft_naive(x: &ComplexSeq) -> ComplexSeq {
    let n = x.len() as u64;
    let roots: Vec<Complex64> = (0..n).map(|t| unit_root(t, n)).collect();
    let values = (0..n)
        .map(|j| {
            let mut acc = ComplexNeumaierSum::new();
            for (k, &v) in x.as_slice().iter().enumerate() {
                acc += v * roots[((j * k as u64) % n) as usize];
            }
            acc.value()
        })
        .collect();
    ComplexSeq { values }
}

/// `O(n log n)` DFT of any length, same contract as [`dft_naive`].
pub fn dft_fast(x: &ComplexSeq) -> ComplexSeq {
    let mut values = x.values.clone();
    DftPlan::new(values.len()).forward(&mut values);
    ComplexSeq { values }
}

/// Inverse of [`dft_fast`]: `x[k] = (1/n) sum_j X[j] e(jk/n)`.
pub fn idft_fast(x: &ComplexSeq) -> ComplexSeq {
    let mut values = x.values.clone();
    DftPlan::new(values.len()).inverse(&mut values);
    ComplexSeq { values }
}

#[derive(Clone, Debug)]
struct Radix2 {
    n: usize,
    /// `e(-k/(2h))` for `k < h`, for each stage half-width `h = 1, 2, 4, ...`
    /// in turn, so stage `h` starts at offset `h - 1`.
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let base: Vec<Complex64> = (0..n / 2).map(|k| unit_root(k as u64, n as u64)).collect();
        let mut twiddles = Vec::with_capacity(n.saturating_sub(1));
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            twiddles.extend((0..half).map(|k| base[k * stride]));
            half <<= 1;
        }
        Radix2 { n, twiddles }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(buf.len(), n);
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let tw = &self.twiddles[half - 1..2 * half - 1];
            for chunk in buf.chunks_exact_mut(2 * half) {
                let (lo, hi) = chunk.split_at_mut(half);
                for ((a, b), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                    let t = *b * w;
                    *b = *a - t;
                    *a += t;
                }
            }
            half <<= 1;
        }
    }
}

thread_local! {
    static RADIX2: RefCell<HashMap<usize, Arc<Radix2>>> = RefCell::new(HashMap::new());
}

/// The radix-2 kernel of length `n`, shared by every plan built on this
/// thread.
fn radix2(n: usize) -> Arc<Radix2> {
    RADIX2.with(|cache| {
        cache
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| Arc::new(Radix2::new(n)))
            .clone()
    })
}

#[derive(Clone, Debug)]
enum Kernel {
    Radix2(Arc<Radix2>),
    Bluestein {
        /// `e(-k^2/(2n))` for `k < n`
        chirp: Vec<Complex64>,
        /// FFT of the conjugate chirp laid out for cyclic convolution
        filter: Vec<Complex64>,
        inner: Arc<Radix2>,
    },
}

/// A reusable transform of one fixed length.
#[derive(Clone, Debug)]
pub struct DftPlan {
    n: usize,
    kernel: Kernel,
}

impl DftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "transform length must be positive");
        if n.is_power_of_two() {
            return DftPlan {
                n,
                kernel: Kernel::Radix2(radix2(n)),
            };
        }
        let m = (2 * n - 1).next_power_of_two();
        let inner = radix2(m);
        let two_n = 2 * n as u64;
        let chirp: Vec<Complex64> = (0..n as u64).map(|k| unit_root(k * k % two_n, two_n)).collect();
        let mut filter = vec![Complex64::new(0.0, 0.0); m];
        filter[0] = chirp[0].conj();
        for k in 1..n {
            let c = chirp[k].conj();
            filter[k] = c;
            filter[m - k] = c;
        }
        inner.forward(&mut filter);
        DftPlan {
            n,
            kernel: Kernel::Bluestein { chirp, filter, inner },
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place forward transform.
    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n, "buffer length does not match the plan");
        match &self.kernel {
            Kernel::Radix2(r) => r.forward(buf),
            Kernel::Bluestein { chirp, filter, inner } => {
                let m = inner.n;
                let mut work = vec![Complex64::new(0.0, 0.0); m];
                for ((w, &x), &c) in work.iter_mut().zip(buf.iter()).zip(chirp) {
                    *w = x * c;
                }
                inner.forward(&mut work);
                for (w, &f) in work.iter_mut().zip(filter) {
                    *w = (*w * f).conj();
                }
                // inverse via conjugation; the 1/m goes into the chirp product
                inner.forward(&mut work);
                let scale = 1.0 / m as f64;
                for ((out, &w), &c) in buf.iter_mut().zip(&work).zip(chirp) {
                    *out = w.conj() * c * scale;
                }
            }
        }
    }

    /// In-place inverse transform, normalised by `1/n`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        for z in buf.iter_mut() {
            *z = z.conj();
        }
        self.forward(buf);
        let scale = 1.0 / self.n as f64;
        for z in buf.iter_mut() {
            *z = z.conj() * scale;
        }
    }
}

/// All character sums `sum_a chi_j(a) f(a)` for one prime modulus.
///
/// `sums[j]` uses `chi_j(g^k) = e(jk/(q-1))`; `chi_j` is odd exactly when
/// `j` is odd.
#[derive(Clone, Debug)]
pub struct CharSpectrum {
    q: u64,
    sums: Vec<Complex64>,
}

impl CharSpectrum {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn sums(&self) -> &[Complex64] {
        &self.sums
    }

    pub fn get(&self, j: usize) -> Complex64 {
        self.sums[j]
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }
}

/// Samples `f` along the powers of the primitive root: `x[k] = f(g^k)`.
pub fn sample_by_dlog(field: &PrimeField, f: impl Fn(u64) -> f64) -> Vec<Complex64> {
    field
        .powers()
        .iter()
        .map(|&a| Complex64::new(f(a as u64), 0.0))
        .collect()
}

/// Character sums of `f` over all characters mod `q`.
pub fn char_spectrum(field: &PrimeField, f: impl Fn(u64) -> f64) -> CharSpectrum {
    let plan = DftPlan::new(field.order());
    char_spectrum_with(&plan, field, f)
}

/// [`char_spectrum`] with a caller-supplied plan of length `q - 1`.
pub fn char_spectrum_with(plan: &DftPlan, field: &PrimeField, f: impl Fn(u64) -> f64) -> CharSpectrum {
    let mut x = sample_by_dlog(field, f);
    spectrum_from_samples(plan, field.q(), &mut x)
}

/// Turns samples `x[k] = f(g^k)` into the spectrum, consuming the buffer.
pub(crate) fn spectrum_from_samples(plan: &DftPlan, q: u64, x: &mut [Complex64]) -> CharSpectrum {
    let n = x.len();
    plan.forward(x);
    // sum_k x[k] e(+jk/n) = X[(n - j) mod n]
    let sums = (0..n).map(|j| x[(n - j) % n]).collect();
    CharSpectrum { q, sums }
}

/// Indices of the odd characters and of the even non-principal ones.
pub fn parity_split(spec: &CharSpectrum) -> (Vec<usize>, Vec<usize>) {
    let n = spec.len();
    let odd = (1..n).step_by(2).collect();
    let even = (2..n).step_by(2).collect();
    (odd, even)
}

/// Character sums split by parity and computed with two half-length
/// transforms (decimation in frequency).
///
/// `odd[r]` is the sum for `chi_{2r+1}`, `even[r]` the one for `chi_{2r}`.
#[derive(Clone, Debug)]
pub struct ParityHalves {
    pub odd: Vec<Complex64>,
    pub even: Vec<Complex64>,
}

/// Both parity halves of the spectrum of `f`; `plan` must have length
/// `(q-1)/2`.
pub fn char_spectrum_halves(plan: &DftPlan, field: &PrimeField, f: impl Fn(u64) -> f64) -> ParityHalves {
    let x = sample_by_dlog(field, f);
    ParityHalves {
        odd: odd_half(plan, &x),
        even: even_half(plan, &x),
    }
}

/// Sums for the odd characters from samples `x[k] = f(g^k)`:
/// `out[r] = sum_k x[k] e((2r+1)k/n)`.
///
/// Since `g^{k+h} = -g^k`, only the antisymmetric part
/// `x[k] - x[k+h]` contributes, twisted by `e(k/n)`.
pub fn odd_half(plan: &DftPlan, x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let h = n / 2;
    assert_eq!(plan.len(), h, "plan must have length (q-1)/2");
    let mut diff: Vec<Complex64> = (0..h)
        .map(|k| (x[k] - x[k + h]) * unit_root(k as u64, n as u64).conj())
        .collect();
    plan.forward(&mut diff);
    (0..h).map(|r| diff[(h - r) % h]).collect()
}

/// Sums for the even characters: `out[r] = sum_k x[k] e(2rk/n)`, from the
/// symmetric part `x[k] + x[k+h]`.
pub fn even_half(plan: &DftPlan, x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let h = n / 2;
    assert_eq!(plan.len(), h, "plan must have length (q-1)/2");
    even_half_symmetric(plan, (0..h).map(|k| x[k] + x[k + h]).collect())
}

/// [`even_half`] from the symmetric samples `s[k] = x[k] + x[k+h]` directly.
pub fn even_half_symmetric(plan: &DftPlan, mut s: Vec<Complex64>) -> Vec<Complex64> {
    let h = s.len();
    assert_eq!(plan.len(), h, "plan must have length (q-1)/2");
    plan.forward(&mut s);
    (0..h).map(|r| s[(h - r) % h]).collect()
}
