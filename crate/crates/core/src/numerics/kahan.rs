//! Compensated accumulation and the pinned pairwise reduction tree.
//!
//! Conditionally convergent sums make the reduction order part of the
//! answer, so every reduction in this crate goes through one of two
//! primitives with a fixed, input-length-determined shape:
//!
//! - [`KahanSum`]: sequential compensated accumulation, used inside a
//!   block (or a quadrature panel sweep);
//! - [`tree_sum`]: a pairwise binary tree over a slice, splitting at the
//!   midpoint, with short leaves folded by Kahan.
//!
//! Both are bit-reproducible regardless of thread count; parallel callers
//! evaluate terms into a `Vec` first and reduce with [`tree_sum`].

use num_complex::Complex64;

/// Classic Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

/// Kahan accumulator for complex values (independent compensation per part).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

const TREE_LEAF: usize = 16;

/// Pairwise-tree sum of a slice. The tree shape depends only on the slice
/// length, so the result is identical no matter how the leaves were produced.
pub fn tree_sum(values: &[f64]) -> f64 {
    if values.len() <= TREE_LEAF {
        return KahanSum::sum_iter(values.iter().copied());
    }
    let mid = values.len() / 2;
    tree_sum(&values[..mid]) + tree_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        // 1 + eps-sized crumbs that naive summation drops
        let mut naive = 0.0_f64;
        let mut kahan = KahanSum::new();
        naive += 1.0;
        kahan.add(1.0);
        for _ in 0..1_000_000 {
            naive += 1e-16;
            kahan.add(1e-16);
        }
        assert_eq!(naive, 1.0); // lost
        assert!((kahan.value() - (1.0 + 1e-10)).abs() < 1e-15);
    }

    #[test]
    fn tree_matches_sequential_for_exact_inputs() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(tree_sum(&v), 999.0 * 1000.0 / 2.0);
    }

    #[test]
    fn tree_sum_empty_and_single() {
        assert_eq!(tree_sum(&[]), 0.0);
        assert_eq!(tree_sum(&[4.25]), 4.25);
    }
}
