//! Multi-index arithmetic: the exponents `α, β, k, ν, γ` used throughout.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::One;

/// A `d`-tuple of nonnegative integer exponents, `d ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        assert!(!exponents.is_empty(), "multi-index needs dimension >= 1");
        MultiIndex(exponents)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    /// The vector `𝟙 = (1, …, 1)`.
    pub fn ones(dim: usize) -> Self {
        Self::new(vec![1; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    /// The order `|α| = Σ_j α_j`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise partial order `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise subtraction; `None` unless `other ≤ self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.le(self) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// The monomial value `x^α = Π_j x_j^{α_j}`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        assert_eq!(self.dim(), x.len());
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xj)| xj.powi(a as i32))
            .product()
    }

    /// `x^{-(α+𝟙)} = Π_j x_j^{-(α_j+1)}`; caller keeps `x` off the hyperplanes.
    pub fn negative_power(&self, x: &[f64]) -> f64 {
        assert_eq!(self.dim(), x.len());
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xj)| xj.powi(-(a as i32) - 1))
            .product()
    }

    /// Every multi-index `β` with `β ≤ max`, in lexicographic order.
    pub fn iter_below(max: &MultiIndex) -> impl Iterator<Item = MultiIndex> + '_ {
        let dim = max.dim();
        let mut cur = vec![0u32; dim];
        let mut done = false;
        core::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = MultiIndex(cur.clone());
            // odometer increment
            let mut axis = dim;
            loop {
                if axis == 0 {
                    done = true;
                    break;
                }
                axis -= 1;
                if cur[axis] < max.0[axis] {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = 0;
            }
            Some(out)
        })
    }
}

/// The exact ratio `Π_j (α_j + k_j)! / α_j!`, arbitrary precision.
pub fn factorial_ratio(alpha: &MultiIndex, k: &MultiIndex) -> BigUint {
    assert_eq!(alpha.dim(), k.dim());
    let mut out = BigUint::one();
    for (&a, &kk) in alpha.components().iter().zip(k.components()) {
        for m in a + 1..=a + kk {
            out *= BigUint::from(m);
        }
    }
    out
}

/// `factorial_ratio` as a float, for use inside quadrature-side formulas.
pub fn factorial_ratio_f64(alpha: &MultiIndex, k: &MultiIndex) -> f64 {
    biguint_to_f64(&factorial_ratio(alpha, k))
}

pub(crate) fn biguint_to_f64(value: &BigUint) -> f64 {
    let digits = value.to_u64_digits();
    let mut out = 0.0f64;
    for &d in digits.iter().rev() {
        out = out * 1.8446744073709552e19 + d as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_ratio_examples() {
        // 5!/2! = 60
        let a = MultiIndex::new(vec![2]);
        let k = MultiIndex::new(vec![3]);
        assert_eq!(factorial_ratio(&a, &k), BigUint::from(60u32));
        // empty product
        let z = MultiIndex::zeros(1);
        assert_eq!(factorial_ratio(&z, &z), BigUint::one());
        // per-axis products: (1,2),(2,1) -> 6 * 3 = 18
        let a = MultiIndex::new(vec![1, 2]);
        let k = MultiIndex::new(vec![2, 1]);
        assert_eq!(factorial_ratio(&a, &k), BigUint::from(18u32));
    }

    #[test]
    fn factorial_ratio_composes() {
        let a = MultiIndex::new(vec![2, 1]);
        let k = MultiIndex::new(vec![1, 3]);
        let m = MultiIndex::new(vec![2, 2]);
        let lhs = factorial_ratio(&a, &k) * factorial_ratio(&a.add(&k), &m);
        let rhs = factorial_ratio(&a, &k.add(&m));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn iter_below_counts() {
        let max = MultiIndex::new(vec![2, 3]);
        let all: Vec<_> = MultiIndex::iter_below(&max).collect();
        assert_eq!(all.len(), 3 * 4);
        assert!(all.iter().all(|b| b.le(&max)));
    }

    #[test]
    fn monomial_and_negative_power() {
        let a = MultiIndex::new(vec![2, 1]);
        assert_eq!(a.monomial(&[2.0, -3.0]), -12.0);
        assert_eq!(a.negative_power(&[2.0, 1.0]), 1.0 / 8.0);
    }
}
