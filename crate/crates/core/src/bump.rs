//! Compactly supported smooth test functions with exact derivatives of every
//! order.
//!
//! The basis element is `ψ(u) = exp(-1/(1-u²))` for `|u| < 1`, zero outside.
//! Its derivatives satisfy `ψ^{(n)}(u) = R_n(u)/(1-u²)^{2n} · ψ(u)` where the
//! `R_n` are integer polynomials obtained by symbolic recursion; evaluation
//! switches to floating point only at the very end.

use crate::error::Error;
use crate::multi_index::MultiIndex;
use crate::quad::{integrate_cells, PairingConfig};
use crate::region::Cell;
use crate::{Result, Scalar};
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{ToPrimitive, Zero};
use once_cell::race::OnceBox;

/// `∫_{-1}^{1} exp(-1/(1-u²)) du`, frozen from a high-resolution fixed-rule
/// computation; the quadrature engine is tested against it.
pub const BUMP_MASS_1D: f64 = 0.443_993_816_168_079_4;

const CACHED_ORDERS: usize = 40;

static PSI_POLYS: OnceBox<Vec<Vec<f64>>> = OnceBox::new();

fn compute_psi_polys(orders: usize) -> Vec<Vec<BigInt>> {
    // R_0 = 1; R_{n+1} = R_n'(1-u²)² + 4n·u·R_n(1-u²) - 2u·R_n
    let mut polys: Vec<Vec<BigInt>> = vec![vec![BigInt::from(1)]];
    for n in 0..orders {
        let r = &polys[n];
        let deg = r.len() - 1;
        let mut next = vec![BigInt::zero(); deg + 4];
        // R_n'(u) * (1 - 2u² + u⁴)
        for (i, c) in r.iter().enumerate().skip(1) {
            let d = c * BigInt::from(i as u64);
            next[i - 1] += &d;
            next[i + 1] -= BigInt::from(2) * &d;
            next[i + 3] += &d;
        }
        // 4n·u·R_n·(1-u²) - 2u·R_n
        let fourn = BigInt::from(4 * n as u64);
        for (i, c) in r.iter().enumerate() {
            next[i + 1] += &fourn * c - BigInt::from(2) * c;
            next[i + 3] -= &fourn * c;
        }
        while next.len() > 1 && next.last().map(|c| c.is_zero()).unwrap_or(false) {
            next.pop();
        }
        polys.push(next);
    }
    polys
}

fn psi_poly_table() -> &'static [Vec<f64>] {
    PSI_POLYS.get_or_init(|| {
        Box::new(
            compute_psi_polys(CACHED_ORDERS)
                .iter()
                .map(|p| p.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect())
                .collect(),
        )
    })
}

fn poly_eval(coeffs: &[f64], u: f64) -> f64 {
    let mut v = 0.0;
    for &c in coeffs.iter().rev() {
        v = v * u + c;
    }
    v
}

/// `ψ^{(n)}(u)`, exact formula, total on all of ℝ.
pub fn psi_derivative(n: usize, u: f64) -> f64 {
    let t = 1.0 - u * u;
    // below this threshold exp(-1/t) underflows before 1/t^{2n} overflows
    if t < 1e-12 {
        return 0.0;
    }
    let coeffs: Vec<f64>;
    let poly: &[f64] = if n < CACHED_ORDERS {
        &psi_poly_table()[n]
    } else {
        coeffs = compute_psi_polys(n)[n]
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect();
        &coeffs
    };
    poly_eval(poly, u) * t.powi(-2 * (n as i32)) * (-1.0 / t).exp()
}

/// `ψ(u)`.
pub fn psi(u: f64) -> f64 {
    psi_derivative(0, u)
}

/// One tensor-product term `c · Π_j (x_j - m_j)^{γ_j} ψ((x_j - m_j)/s_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpTerm {
    pub coeff: f64,
    pub gamma: MultiIndex,
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
}

impl BumpTerm {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Support is exactly `Π_j [m_j - s_j, m_j + s_j]`.
    pub fn support(&self) -> Cell {
        Cell::new(
            self.center.iter().zip(&self.scale).map(|(m, s)| m - s).collect(),
            self.center.iter().zip(&self.scale).map(|(m, s)| m + s).collect(),
        )
    }

    fn axis_derivative(&self, axis: usize, order: u32, x: f64) -> f64 {
        let m = self.center[axis];
        let s = self.scale[axis];
        let g = self.gamma.get(axis);
        let u = (x - m) / s;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        // Leibniz over (x-m)^g and ψ((x-m)/s)
        let mut total = 0.0;
        let mut binom = 1.0f64; // C(order, i)
        let mut falling = 1.0f64; // g(g-1)...(g-i+1)
        for i in 0..=order.min(g) {
            let poly_part = (x - m).powi((g - i) as i32);
            let psi_part = psi_derivative((order - i) as usize, u) / s.powi((order - i) as i32);
            total += binom * falling * poly_part * psi_part;
            binom *= (order - i) as f64 / (i + 1) as f64;
            falling *= (g - i) as f64;
        }
        total
    }

    pub fn eval_derivative(&self, k: &MultiIndex, x: &[f64]) -> f64 {
        let mut v = self.coeff;
        for axis in 0..self.dim() {
            v *= self.axis_derivative(axis, k.get(axis), x[axis]);
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    }
}

/// An element of `𝒟(ℝ^d)` at desk scale: a finite sum of bump terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    terms: Vec<BumpTerm>,
    dim: usize,
}

impl TestFunction {
    pub fn new(terms: Vec<BumpTerm>) -> Self {
        assert!(!terms.is_empty());
        let dim = terms[0].dim();
        assert!(terms.iter().all(|t| t.dim() == dim && t.gamma.dim() == dim));
        TestFunction { terms, dim }
    }

    /// The unit bump `Π_j ψ(x_j)` on `[-1,1]^d`.
    pub fn unit_bump(dim: usize) -> Self {
        TestFunction::new(vec![BumpTerm {
            coeff: 1.0,
            gamma: MultiIndex::zeros(dim),
            center: vec![0.0; dim],
            scale: vec![1.0; dim],
        }])
    }

    /// The normalized bump with unit mass, support `[-1,1]^d`.
    pub fn standard_mollifier(dim: usize) -> Self {
        TestFunction::new(vec![BumpTerm {
            coeff: BUMP_MASS_1D.powi(-(dim as i32)),
            gamma: MultiIndex::zeros(dim),
            center: vec![0.0; dim],
            scale: vec![1.0; dim],
        }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[BumpTerm] {
        &self.terms
    }

    /// Bounding box of the union of term supports.
    pub fn support_cell(&self) -> Cell {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for t in &self.terms {
            let s = t.support();
            for j in 0..self.dim {
                lo[j] = lo[j].min(s.lo[j]);
                hi[j] = hi[j].max(s.hi[j]);
            }
        }
        Cell::new(lo, hi)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_derivative(&MultiIndex::zeros(self.dim), x)
    }

    /// `∂^k φ(x)`, exact formula; zero outside the support.
    pub fn eval_derivative(&self, k: &MultiIndex, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        self.terms.iter().map(|t| t.eval_derivative(k, x)).sum()
    }

    /// The exact test function `ξ ↦ φ(y∘ξ)`; every `y_j` must be nonzero.
    pub fn scale_argument(&self, y: &[f64]) -> Result<TestFunction> {
        assert_eq!(y.len(), self.dim);
        if y.contains(&0.0) {
            return Err(Error::ZeroCoordinate);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut coeff = t.coeff;
                for (axis, &yj) in y.iter().enumerate() {
                    coeff *= yj.powi(t.gamma.get(axis) as i32);
                }
                BumpTerm {
                    coeff,
                    gamma: t.gamma.clone(),
                    center: t.center.iter().zip(y).map(|(m, yj)| m / yj).collect(),
                    scale: t.scale.iter().zip(y).map(|(s, yj)| s / yj.abs()).collect(),
                }
            })
            .collect();
        Ok(TestFunction::new(terms))
    }

    /// The exact test function `u ↦ φ(x - u)` (ψ is even, so the reflection
    /// is representable in the basis).
    pub fn reflected_translate(&self, x: &[f64]) -> TestFunction {
        assert_eq!(x.len(), self.dim);
        let terms = self
            .terms
            .iter()
            .map(|t| BumpTerm {
                coeff: if t.gamma.order() % 2 == 0 { t.coeff } else { -t.coeff },
                gamma: t.gamma.clone(),
                center: x.iter().zip(&t.center).map(|(xj, m)| xj - m).collect(),
                scale: t.scale.clone(),
            })
            .collect();
        TestFunction::new(terms)
    }

    /// `ε^{-d} φ(x/ε)`, exact in the basis.
    pub fn scaled_mollifier(&self, eps: f64) -> TestFunction {
        assert!(eps > 0.0);
        let d = self.dim as i32;
        let terms = self
            .terms
            .iter()
            .map(|t| BumpTerm {
                coeff: t.coeff * eps.powi(-d - t.gamma.order() as i32),
                gamma: t.gamma.clone(),
                center: t.center.iter().map(|m| m * eps).collect(),
                scale: t.scale.iter().map(|s| s * eps).collect(),
            })
            .collect();
        TestFunction::new(terms)
    }

    /// Scale every coefficient.
    pub fn scaled(&self, factor: f64) -> TestFunction {
        let terms = self
            .terms
            .iter()
            .map(|t| BumpTerm {
                coeff: t.coeff * factor,
                ..t.clone()
            })
            .collect();
        TestFunction::new(terms)
    }

    /// `∂^α φ̂(ξ)` with `φ̂(ξ) = ∫ e^{-i⟨ξ,x⟩} φ(x) dx` and the product
    /// pairing `⟨ξ,x⟩ = ξ_1 x_1 + … + ξ_d x_d`; computed by quadrature over
    /// the support.
    pub fn fourier_derivative(
        &self,
        alpha: &MultiIndex,
        xi: &[f64],
        cfg: &PairingConfig,
    ) -> Result<Scalar> {
        assert_eq!(xi.len(), self.dim);
        let support = self.support_cell();
        let minus_i = Scalar::new(0.0, -1.0);
        let prefactor = minus_i.powu(alpha.order());
        let f = |x: &[f64]| -> Scalar {
            let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
            let osc = Scalar::new(phase.cos(), -phase.sin());
            prefactor * alpha.monomial(x) * osc * self.eval(x)
        };
        Ok(integrate_cells(&f, &[support], cfg)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_at_zero() {
        assert!((psi(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(psi(1.0), 0.0);
        assert_eq!(psi(-2.0), 0.0);
    }

    #[test]
    fn unit_bump_values() {
        let phi = TestFunction::unit_bump(1);
        assert!((phi.eval(&[0.0]) - 0.3678794411714423).abs() < 1e-15);
        // even function: odd derivative vanishes at the center
        assert_eq!(phi.eval_derivative(&MultiIndex::new(vec![1]), &[0.0]), 0.0);
        // zero outside support, all orders
        for k in 0..6 {
            assert_eq!(
                phi.eval_derivative(&MultiIndex::new(vec![k]), &[1.5]),
                0.0
            );
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let phi = TestFunction::new(vec![BumpTerm {
            coeff: 0.7,
            gamma: MultiIndex::new(vec![2]),
            center: vec![0.3],
            scale: vec![1.2],
        }]);
        let h = 1e-4;
        for order in 1..=4u32 {
            let k = MultiIndex::new(vec![order]);
            let km = MultiIndex::new(vec![order - 1]);
            for &x in &[0.0, 0.5, -0.4, 1.1] {
                let exact = phi.eval_derivative(&k, &[x]);
                let fd = (phi.eval_derivative(&km, &[x + h]) - phi.eval_derivative(&km, &[x - h]))
                    / (2.0 * h);
                assert!(
                    (exact - fd).abs() <= 1e-5 * (1.0 + exact.abs()),
                    "order {order} at {x}: exact {exact} fd {fd}"
                );
            }
        }
    }

    #[test]
    fn mixed_partials_commute() {
        let phi = TestFunction::new(vec![BumpTerm {
            coeff: 1.0,
            gamma: MultiIndex::new(vec![1, 2]),
            center: vec![0.1, -0.2],
            scale: vec![1.0, 1.5],
        }]);
        // the tensor formula is manifestly symmetric; check against nested
        // finite differences as an independent route
        let k = MultiIndex::new(vec![1, 1]);
        let h = 1e-4;
        let x = [0.4, 0.3];
        let fd = (phi.eval(&[x[0] + h, x[1] + h]) - phi.eval(&[x[0] + h, x[1] - h])
            - phi.eval(&[x[0] - h, x[1] + h])
            + phi.eval(&[x[0] - h, x[1] - h]))
            / (4.0 * h * h);
        assert!((phi.eval_derivative(&k, &x) - fd).abs() < 1e-6);
    }

    #[test]
    fn scale_argument_is_exact() {
        let phi = TestFunction::new(vec![BumpTerm {
            coeff: 2.0,
            gamma: MultiIndex::new(vec![1]),
            center: vec![0.5],
            scale: vec![1.0],
        }]);
        let y = [2.0];
        let scaled = phi.scale_argument(&y).unwrap();
        for &x in &[-0.4, 0.0, 0.2, 0.7] {
            let a = scaled.eval(&[x]);
            let b = phi.eval(&[x * y[0]]);
            assert_eq!(a, b);
        }
        // support halves
        let s = scaled.support_cell();
        assert!((s.lo[0] - (-0.25)).abs() < 1e-15 && (s.hi[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn bump_mass_matches_frozen_oracle() {
        let cfg = PairingConfig::default();
        let phi = TestFunction::unit_bump(1);
        let r = integrate_cells(
            &|x| Scalar::new(phi.eval(x), 0.0),
            &[phi.support_cell()],
            &cfg,
        )
        .unwrap();
        assert!((r.value.re - BUMP_MASS_1D).abs() < 1e-12);
    }
}
