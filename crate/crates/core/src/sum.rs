//! Compensated (Neumaier) summation.
//!
//! The accumulators here carry a running correction term so that long sums
//! of mixed-magnitude terms lose at most a couple of ulps overall instead of
//! one rounding error per addition.

use std::iter::FromIterator;
use std::ops::AddAssign;

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        NeumaierSum { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    #[inline]
    fn add_assign(&mut self, x: f64) {
        self.add(x);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Componentwise compensated sum of complex numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexNeumaierSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexNeumaierSum {
    pub const fn new() -> Self {
        ComplexNeumaierSum {
            re: NeumaierSum::new(),
            im: NeumaierSum::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex64> for ComplexNeumaierSum {
    #[inline]
    fn add_assign(&mut self, z: Complex64) {
        self.add(z);
    }
}

/// Compensated sum of an iterator of reals.
pub fn sum_compensated<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        // naive summation returns 0 here
        let s = sum_compensated([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn harmonic_sum_matches_reverse_order() {
        let fwd = sum_compensated((1..=1_000_000).map(|k| 1.0 / k as f64));
        let rev = sum_compensated((1..=1_000_000).rev().map(|k| 1.0 / k as f64));
        assert!((fwd - rev).abs() <= 2.0 * f64::EPSILON * fwd);
    }

    #[test]
    fn complex_sum_is_componentwise() {
        let mut acc = ComplexNeumaierSum::new();
        acc += Complex64::new(1.0, 1e100);
        acc += Complex64::new(1e100, 1.0);
        acc += Complex64::new(-1e100, -1e100);
        assert_eq!(acc.value(), Complex64::new(1.0, 1.0));
    }
}
