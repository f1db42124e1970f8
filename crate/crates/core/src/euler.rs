//! Exact symbolic algebra of Euler operators `P(θ)`, `θ_j = x_j ∂_j`.
//!
//! The `θ_j` commute as operators, so an Euler operator is a polynomial in
//! commuting indeterminates with exact rational coefficients.  The second
//! presentation `Σ_α c_α x^α ∂^α` is related by per-axis Stirling-number
//! identities (`x^n ∂^n = θ(θ-1)⋯(θ-n+1)`).  Floating point only enters in
//! [`EulerOperator::apply`].

use crate::bump::TestFunction;
use crate::multi_index::{factorial_ratio, MultiIndex};
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = Ratio<BigInt>;

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut v = BigInt::one();
    for i in 0..k {
        v = v * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(v)
}

/// `a (a-1) ⋯ (a-len+1)` for integer `a` (possibly negative).
fn falling(a: i64, len: u32) -> Rational {
    let mut v = BigInt::one();
    for i in 0..len {
        v *= BigInt::from(a - i as i64);
    }
    Rational::from_integer(v)
}

fn prune(coeffs: &mut BTreeMap<MultiIndex, Rational>) {
    coeffs.retain(|_, c| !c.is_zero());
}

/// A polynomial `P(θ) = Σ_β c_β θ^β` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerOperator {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, Rational>,
}

/// The second presentation `Σ_α c_α x^α ∂^α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XdForm {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, Rational>,
}

impl EulerOperator {
    pub fn zero(dim: usize) -> Self {
        EulerOperator {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(MultiIndex::zeros(dim), Rational::one());
        EulerOperator { dim, coeffs }
    }

    /// The single Euler derivative `θ_axis`.
    pub fn theta(dim: usize, axis: usize) -> Self {
        let mut e = vec![0u32; dim];
        e[axis] = 1;
        let mut coeffs = BTreeMap::new();
        coeffs.insert(MultiIndex::new(e), Rational::one());
        EulerOperator { dim, coeffs }
    }

    /// The monomial `θ^β`.
    pub fn theta_pow(beta: &MultiIndex) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(beta.clone(), Rational::one());
        EulerOperator {
            dim: beta.dim(),
            coeffs,
        }
    }

    pub fn from_coeffs(dim: usize, entries: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, v) in entries {
            assert_eq!(k.dim(), dim);
            *coeffs.entry(k).or_insert_with(Rational::zero) += v;
        }
        prune(&mut coeffs);
        EulerOperator { dim, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.coeffs
    }

    pub fn add(&self, other: &EulerOperator) -> EulerOperator {
        assert_eq!(self.dim, other.dim);
        let mut coeffs = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            *coeffs.entry(k.clone()).or_insert_with(Rational::zero) += v.clone();
        }
        prune(&mut coeffs);
        EulerOperator {
            dim: self.dim,
            coeffs,
        }
    }

    pub fn scale(&self, factor: &Rational) -> EulerOperator {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), v * factor))
            .collect();
        EulerOperator {
            dim: self.dim,
            coeffs,
        }
    }

    /// Composition of operators = polynomial multiplication in the commuting
    /// variables `θ_j`.
    pub fn compose(&self, other: &EulerOperator) -> EulerOperator {
        assert_eq!(self.dim, other.dim);
        let mut coeffs: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (ka, va) in &self.coeffs {
            for (kb, vb) in &other.coeffs {
                *coeffs
                    .entry(ka.add(kb))
                    .or_insert_with(Rational::zero) += va * vb;
            }
        }
        prune(&mut coeffs);
        EulerOperator {
            dim: self.dim,
            coeffs,
        }
    }

    /// The formal adjoint: substitute `θ_j → -θ_j - 1` (from `(x∂)^* = -∂x`);
    /// a ring homomorphism since the `θ_j` commute.
    pub fn adjoint(&self) -> EulerOperator {
        let mut out = BTreeMap::new();
        for (beta, c) in &self.coeffs {
            // Π_j (-θ_j - 1)^{β_j} = Π_j (-1)^{β_j} Σ_k C(β_j, k) θ_j^k
        let sign = if beta.order() % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            for gamma in MultiIndex::iter_below(beta) {
                let mut v = c * &sign;
                for j in 0..self.dim {
                    v *= binomial(beta.get(j), gamma.get(j));
                }
                *out.entry(gamma).or_insert_with(Rational::zero) += v;
            }
        }
        prune(&mut out);
        EulerOperator {
            dim: self.dim,
            coeffs: out,
        }
    }

    /// `P(α)`: the exact scalar with `P(θ) x^α = P(α) x^α`.
    pub fn monomial_eigenvalue(&self, alpha: &MultiIndex) -> Rational {
        self.eval_at(
            &alpha
                .components()
                .iter()
                .map(|&a| BigInt::from(a))
                .collect::<Vec<_>>(),
        )
    }

    /// Evaluate the polynomial at an integer vector.
    pub fn eval_at(&self, values: &[BigInt]) -> Rational {
        assert_eq!(values.len(), self.dim);
        let mut total = Rational::zero();
        for (beta, c) in &self.coeffs {
            let mut v = c.clone();
            for (j, &b) in beta.components().iter().enumerate() {
                v *= Rational::from_integer(values[j].pow(b));
            }
            total += v;
        }
        total
    }

    /// The eigenvalue of `P(θ)^*` on `σ(x)/x^{α+𝟙}`: since `θ_j` acts there
    /// with eigenvalue `-(α_j+1)`, the adjoint acts with `P(α)`.
    pub fn negative_power_adjoint_eigenvalue(&self, alpha: &MultiIndex) -> Rational {
        self.monomial_eigenvalue(alpha)
    }

    /// Convert to `Σ_α c_α x^α ∂^α` via `θ^n = Σ_k S(n,k) x^k ∂^k`
    /// (Stirling numbers of the second kind, per axis).
    pub fn to_xd_form(&self) -> XdForm {
        let max_order = self
            .coeffs
            .keys()
            .flat_map(|b| b.components().iter().copied())
            .max()
            .unwrap_or(0);
        let s2 = stirling_second(max_order);
        let mut out: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (beta, c) in &self.coeffs {
            for alpha in MultiIndex::iter_below(beta) {
                let mut v = c.clone();
                for j in 0..self.dim {
                    v *= Rational::from_integer(
                        s2[beta.get(j) as usize][alpha.get(j) as usize].clone(),
                    );
                }
                if !v.is_zero() {
                    *out.entry(alpha).or_insert_with(Rational::zero) += v;
                }
            }
        }
        prune(&mut out);
        XdForm {
            dim: self.dim,
            coeffs: out,
        }
    }

    /// The operator `f ↦ (x^β f)^{(β)}` in Euler form: per axis the product
    /// `(θ_j + 1)(θ_j + 2) ⋯ (θ_j + β_j)`.
    pub fn power_shift(beta: &MultiIndex) -> EulerOperator {
        let dim = beta.dim();
        let mut op = EulerOperator::one(dim);
        for axis in 0..dim {
            for i in 1..=beta.get(axis) {
                let factor = EulerOperator::theta(dim, axis)
                    .add(&EulerOperator::one(dim).scale(&rat(i as i64)));
                op = op.compose(&factor);
            }
        }
        op
    }

    /// `Σ c_α x^α φ^{(α)}(x)` using exact derivatives; the only
    /// floating-point path in this module.
    pub fn apply(&self, phi: &TestFunction, x: &[f64]) -> f64 {
        self.to_xd_form().apply(phi, x)
    }
}

impl XdForm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.coeffs
    }

    pub fn from_coeffs(dim: usize, entries: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, v) in entries {
            assert_eq!(k.dim(), dim);
            *coeffs.entry(k).or_insert_with(Rational::zero) += v;
        }
        prune(&mut coeffs);
        XdForm { dim, coeffs }
    }

    /// Coefficients as floats, for quadrature-side integrands.
    pub fn terms_f64(&self) -> Vec<(MultiIndex, f64)> {
        self.coeffs
            .iter()
            .map(|(k, v)| (k.clone(), v.to_f64().expect("rational fits in f64")))
            .collect()
    }

    /// Convert back via `x^n ∂^n = θ(θ-1)⋯(θ-n+1)` (falling factorial).
    pub fn to_euler(&self) -> EulerOperator {
        let max_order = self
            .coeffs
            .keys()
            .flat_map(|b| b.components().iter().copied())
            .max()
            .unwrap_or(0);
        let s1 = falling_factorial_coeffs(max_order);
        let mut out: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (alpha, c) in &self.coeffs {
            for gamma in MultiIndex::iter_below(alpha) {
                let mut v = c.clone();
                for j in 0..self.dim {
                    v *= Rational::from_integer(
                        s1[alpha.get(j) as usize][gamma.get(j) as usize].clone(),
                    );
                }
                if !v.is_zero() {
                    *out.entry(gamma).or_insert_with(Rational::zero) += v;
                }
            }
        }
        prune(&mut out);
        EulerOperator {
            dim: self.dim,
            coeffs: out,
        }
    }

    pub fn apply(&self, phi: &TestFunction, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (alpha, c) in &self.coeffs {
            let cf = c.to_f64().expect("rational fits in f64");
            total += cf * alpha.monomial(x) * phi.eval_derivative(alpha, x);
        }
        total
    }
}

/// `S(n,k)` for `0 ≤ k ≤ n ≤ max`.
fn stirling_second(max: u32) -> Vec<Vec<BigInt>> {
    let n = max as usize;
    let mut table = vec![vec![BigInt::zero(); n + 1]; n + 1];
    table[0][0] = BigInt::one();
    for i in 1..=n {
        for k in 1..=i {
            let a = table[i - 1][k].clone() * BigInt::from(k as u64);
            let b = table[i - 1][k - 1].clone();
            table[i][k] = a + b;
        }
    }
    table
}

/// Coefficients of `θ(θ-1)⋯(θ-n+1)` in the monomial basis (signed Stirling
/// numbers of the first kind).
fn falling_factorial_coeffs(max: u32) -> Vec<Vec<BigInt>> {
    let n = max as usize;
    let mut table: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    table.push(vec![BigInt::one()]);
    for i in 1..=n {
        let prev = &table[i - 1];
        let mut next = vec![BigInt::zero(); i + 1];
        // multiply by (θ - (i-1))
        for (p, c) in prev.iter().enumerate() {
            next[p + 1] += c;
            next[p] -= c * BigInt::from(i as u64 - 1);
        }
        table.push(next);
    }
    table
}

/// The exact factor in `x^k (σ(x)/x^{α+𝟙})^{(k)} = (-1)^{|k|} (α+k)!/α! ·
/// σ(x)/x^{α+𝟙}`.
pub fn negative_power_action(k: &MultiIndex, alpha: &MultiIndex) -> Rational {
    let mag = Rational::from_integer(BigInt::from(factorial_ratio(alpha, k)));
    if k.order().is_multiple_of(2) {
        mag
    } else {
        -mag
    }
}

/// Coefficients `λ_j` with `x^{m+ν} G^{(ν)} = Σ_{0≤j≤ν} λ_j (x^{m+j} G)^{(j)}`
/// as an exact operator identity; solved per axis by back-substitution in the
/// triangular basis `{x^{m+i} G^{(i)}}` and tensorized.
pub fn weighted_derivative_decomposition(m: &[i64], nu: &MultiIndex) -> BTreeMap<MultiIndex, Rational> {
    assert_eq!(m.len(), nu.dim());
    let per_axis: Vec<Vec<Rational>> = m
        .iter()
        .zip(nu.components())
        .map(|(&mj, &nj)| weighted_derivative_axis(mj, nj))
        .collect();
    let mut out = BTreeMap::new();
    for j in MultiIndex::iter_below(nu) {
        let mut v = Rational::one();
        for axis in 0..nu.dim() {
            v *= per_axis[axis][j.get(axis) as usize].clone();
        }
        if !v.is_zero() {
            out.insert(j, v);
        }
    }
    out
}

fn weighted_derivative_axis(m: i64, nu: u32) -> Vec<Rational> {
    // (x^{m+j} G)^{(j)} = Σ_{i≤j} C(j,i) · (m+j)(m+j-1)⋯(m+i+1) · x^{m+i} G^{(i)}
    let n = nu as usize;
    let a = |j: u32, i: u32| -> Rational { binomial(j, i) * falling(m + j as i64, j - i) };
    let mut lambda = vec![Rational::zero(); n + 1];
    lambda[n] = Rational::one();
    for i in (0..n).rev() {
        let mut acc = Rational::zero();
        for j in i + 1..=n {
            acc += lambda[j].clone() * a(j as u32, i as u32);
        }
        lambda[i] = -acc; // target coefficient is zero below the top
    }
    lambda
}
