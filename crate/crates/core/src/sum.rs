//! Compensated summation.
//!
//! Sums such as `Σ S_{i-1}` grow like `n²` while the quantities built from
//! them are `O(1/n)`, so every accumulation in the crate goes through
//! [`NeumaierSum`].

use std::iter::Sum;
use std::ops::{Add, AddAssign};

/// Kahan-Babuska-Neumaier running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
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
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Add for NeumaierSum {
    type Output = NeumaierSum;

    fn add(mut self, rhs: Self) -> Self {
        NeumaierSum::add(&mut self, rhs.sum);
        NeumaierSum::add(&mut self, rhs.comp);
        self
    }
}

impl Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            NeumaierSum::add(&mut acc, x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().sum::<NeumaierSum>().value()
}

/// Compensated mean; `NaN` for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    compensated_sum(xs) / xs.len() as f64
}

/// Running prefix sums `out[k] = xs[0] + ... + xs[k-1]`, `out[0] = 0`.
pub fn prefix_sums<I: IntoIterator<Item = f64>>(xs: I) -> Vec<f64> {
    let iter = xs.into_iter();
    let mut out = Vec::with_capacity(iter.size_hint().0 + 1);
    let mut acc = NeumaierSum::new();
    out.push(0.0);
    for x in iter {
        NeumaierSum::add(&mut acc, x);
        out.push(acc.value());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_next_to_large_ones() {
        let xs = [1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(&xs), 1.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn many_tenths() {
        let xs = vec![0.1; 1_000_000];
        let naive: f64 = xs.iter().sum();
        let comp = compensated_sum(&xs);
        assert!((comp - 100_000.0).abs() < 1e-9);
        assert!((naive - 100_000.0).abs() > (comp - 100_000.0).abs());
    }

    #[test]
    fn prefix_matches_partial_sums() {
        let p = prefix_sums([1.0, 2.0, 3.0]);
        assert_eq!(p, vec![0.0, 1.0, 3.0, 6.0]);
    }

    #[test]
    fn merge_two_accumulators() {
        let a: NeumaierSum = [1e16, 1.0].into_iter().sum();
        let b: NeumaierSum = [1.0, -1e16].into_iter().sum();
        assert_eq!((a + b).value(), 2.0);
    }
}
