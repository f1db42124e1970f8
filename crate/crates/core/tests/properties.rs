//! Randomized invariants: the exact operator algebra under proptest, and the
//! quadrature-backed identities on seeded random inputs.

use approx::assert_relative_eq;
use hadamard_core::euler::{negative_power_action, weighted_derivative_decomposition, Rational};
use hadamard_core::multi_index::factorial_ratio;
use hadamard_core::quad::integrate_cells;
use hadamard_core::{
    Atom, BumpTerm, Cell, Distribution, EulerOperator, MultiIndex, PairingConfig, Scalar,
    TestFunction, XdForm,
};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A random Euler operator in `dim` variables with small integer coefficients.
fn euler_op(dim: usize) -> impl Strategy<Value = EulerOperator> {
    let entry = (prop::collection::vec(0u32..4, dim), -9i64..10);
    prop::collection::vec(entry, 1..5).prop_map(move |entries| {
        EulerOperator::from_coeffs(
            dim,
            entries
                .into_iter()
                .map(|(exps, c)| (MultiIndex::new(exps), rat(c))),
        )
    })
}

fn multi_index(dim: usize, max: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max, dim).prop_map(MultiIndex::new)
}

proptest! {
    /// The adjoint is an involution and an algebra homomorphism.
    #[test]
    fn adjoint_involution_and_homomorphism(
        p in euler_op(2),
        q in euler_op(2),
    ) {
        prop_assert_eq!(p.adjoint().adjoint(), p.clone());
        prop_assert_eq!(
            p.compose(&q).adjoint(),
            p.adjoint().compose(&q.adjoint())
        );
        prop_assert_eq!(
            p.add(&q).adjoint(),
            p.adjoint().add(&q.adjoint())
        );
    }

    /// `P ↦ P(α)` is a ring homomorphism for every monomial exponent `α`.
    #[test]
    fn monomial_eigenvalue_is_ring_homomorphism(
        p in euler_op(2),
        q in euler_op(2),
        alpha in multi_index(2, 6),
    ) {
        prop_assert_eq!(
            p.compose(&q).monomial_eigenvalue(&alpha),
            p.monomial_eigenvalue(&alpha) * q.monomial_eigenvalue(&alpha)
        );
        prop_assert_eq!(
            p.add(&q).monomial_eigenvalue(&alpha),
            p.monomial_eigenvalue(&alpha) + q.monomial_eigenvalue(&alpha)
        );
    }

    /// Conversion between the `θ`-monomial and `x^α ∂^α` presentations is a
    /// bijection on random operators.
    #[test]
    fn stirling_round_trip_random(p in euler_op(2)) {
        prop_assert_eq!(p.to_xd_form().to_euler(), p.clone());
        let xd = XdForm::from_coeffs(
            2,
            p.coeffs().iter().map(|(k, v)| (k.clone(), v.clone())),
        );
        prop_assert_eq!(xd.to_euler().to_xd_form(), xd);
    }

    /// The weighted-derivative decomposition reproduces the left-hand side on
    /// every monomial `G = x^n`, for random weights and orders.
    #[test]
    fn weighted_decomposition_exact_on_monomials(
        m in prop::collection::vec(-3i64..5, 1..=2),
        nu_exps in prop::collection::vec(0u32..=4, 1..=2),
        n in 0i64..8,
    ) {
        prop_assume!(m.len() == nu_exps.len());
        let nu = MultiIndex::new(nu_exps);
        let lambda = weighted_derivative_decomposition(&m, &nu);
        let falling = |a: i64, len: u32| -> Rational {
            let mut v = BigInt::from(1);
            for i in 0..len {
                v *= BigInt::from(a - i as i64);
            }
            Rational::from_integer(v)
        };
        // compare the scalar factors produced on G = x^n per axis
        let mut lhs = rat(1);
        for axis in 0..nu.dim() {
            lhs *= falling(n, nu.get(axis));
        }
        let mut rhs = Rational::from_integer(BigInt::from(0));
        for (j, lam) in &lambda {
            let mut v = lam.clone();
            for axis in 0..nu.dim() {
                v *= falling(m[axis] + j.get(axis) as i64 + n, j.get(axis));
            }
            rhs += v;
        }
        prop_assert_eq!(lhs, rhs);
    }

    /// The exact action on `σ/x^{α+𝟙}` composes: applying `x^k(·)^{(k)}` and
    /// then `x^{k'}(·)^{(k')}` equals applying the combined order.
    #[test]
    fn negative_power_action_composition(
        k in multi_index(2, 3),
        kp in multi_index(2, 3),
        alpha in multi_index(2, 4),
    ) {
        prop_assert_eq!(
            negative_power_action(&k, &alpha)
                * negative_power_action(&kp, &alpha.add(&k)),
            negative_power_action(&k.add(&kp), &alpha)
        );
        // its magnitude is the factorial ratio
        let mag = Rational::from_integer(BigInt::from(factorial_ratio(&alpha, &k)));
        prop_assert_eq!(negative_power_action(&k, &alpha).abs(), mag);
    }

    /// `scale_argument` is exact up to floating-point regrouping of the
    /// polynomial factor: `y^γ (x - m/y)^γ` versus `(xy - m)^γ`.
    #[test]
    fn scale_argument_pointwise_exact(
        y in prop::sample::select(vec![0.5f64, -0.75, 1.0, 2.0, -3.0]),
        center in -2.0f64..2.0,
        x in -3.0f64..3.0,
        gamma in 0u32..3,
    ) {
        let phi = TestFunction::new(vec![BumpTerm {
            coeff: 1.3,
            gamma: MultiIndex::new(vec![gamma]),
            center: vec![center],
            scale: vec![1.1],
        }]);
        let scaled = phi.scale_argument(&[y]).unwrap();
        let (a, b) = (scaled.eval(&[x]), phi.eval(&[x * y]));
        prop_assert!((a - b).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())), "{a} vs {b}");
    }

    /// A random multi-index below `max` stays below `max`, and the odometer
    /// enumerates exactly the product of the axis ranges.
    #[test]
    fn iter_below_is_complete(max in multi_index(2, 4)) {
        let all: Vec<_> = MultiIndex::iter_below(&max).collect();
        let count: usize = max
            .components()
            .iter()
            .map(|&c| c as usize + 1)
            .product();
        prop_assert_eq!(all.len(), count);
        prop_assert!(all.iter().all(|b| b.le(&max)));
        // pairwise distinct by lexicographic construction
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), count);
    }
}

fn cfg() -> PairingConfig {
    PairingConfig::default()
}

fn random_bump(rng: &mut ChaCha8Rng) -> TestFunction {
    TestFunction::new(vec![BumpTerm {
        coeff: rng.gen_range(0.5..2.0),
        gamma: MultiIndex::new(vec![rng.gen_range(0..3u32)]),
        center: vec![rng.gen_range(-1.5..1.5)],
        scale: vec![rng.gen_range(0.4..1.2)],
    }])
}

/// `⟨P(θ) t, φ⟩ = ∫ t · P*(θ)φ` for random operators against quadrature of
/// the explicitly expanded adjoint.
#[test]
fn adjoint_pairing_matches_expanded_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let base = hadamard_core::dist::indicator(vec![1.0], vec![2.0]);
    for _ in 0..5 {
        let p = EulerOperator::from_coeffs(
            1,
            [
                (MultiIndex::new(vec![rng.gen_range(0..3u32)]), rat(rng.gen_range(-4..5))),
                (MultiIndex::new(vec![rng.gen_range(0..3u32)]), rat(rng.gen_range(-4..5))),
            ],
        );
        let phi = random_bump(&mut rng);
        let t = Distribution::new(
            1,
            p.coeffs()
                .iter()
                .map(|(beta, c)| Atom::Euler {
                    beta: beta.clone(),
                    coeff: Scalar::new(num_traits::ToPrimitive::to_f64(c).unwrap(), 0.0),
                    base: base.clone(),
                })
                .collect::<Vec<_>>(),
        );
        let lhs = t.pair(&phi, &cfg()).unwrap().value;
        let adjoint = p.adjoint().to_xd_form();
        let rhs = integrate_cells(
            &|x: &[f64]| base.eval(x) * adjoint.apply(&phi, x),
            &[Cell::new(vec![1.0], vec![2.0])],
            &cfg(),
        )
        .unwrap()
        .value;
        assert!((lhs - rhs).norm() < 1e-9, "{lhs} vs {rhs}");
    }
}

/// The dilation group law `D_a D_b = D_{ab}` on random scales and atoms.
#[test]
fn dilation_group_law_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = Distribution::new(
        1,
        vec![
            Atom::Density(hadamard_core::dist::indicator(vec![1.0], vec![2.0])),
            Atom::Point {
                location: vec![1.4],
                beta: MultiIndex::new(vec![1]),
                coeff: Scalar::new(0.8, -0.3),
            },
        ],
    );
    for _ in 0..6 {
        let sign_a = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let sign_b = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let a = [sign_a * rng.gen_range(0.5..2.5)];
        let b = [sign_b * rng.gen_range(0.5..2.5)];
        let phi = random_bump(&mut rng);
        let lhs = t
            .dilate(&a)
            .unwrap()
            .dilate(&b)
            .unwrap()
            .pair(&phi, &cfg())
            .unwrap()
            .value;
        let rhs = t
            .dilate(&[a[0] * b[0]])
            .unwrap()
            .pair(&phi, &cfg())
            .unwrap()
            .value;
        assert!((lhs - rhs).norm() < 1e-8, "a={a:?} b={b:?}: {lhs} vs {rhs}");
    }
}

/// Differentiation under the Fourier integral: `φ̂^{(α)}` from the library
/// matches a central difference of `φ̂^{(α-1)}` at random frequencies.
#[test]
fn fourier_derivative_matches_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..4 {
        let phi = random_bump(&mut rng);
        let xi = rng.gen_range(-3.0..3.0);
        let alpha = MultiIndex::new(vec![rng.gen_range(1..3u32)]);
        let lower = MultiIndex::new(vec![alpha.get(0) - 1]);
        let exact = phi.fourier_derivative(&alpha, &[xi], &cfg()).unwrap();
        let h = 1e-3;
        let fp = phi.fourier_derivative(&lower, &[xi + h], &cfg()).unwrap();
        let fm = phi.fourier_derivative(&lower, &[xi - h], &cfg()).unwrap();
        let fd = (fp - fm) / (2.0 * h);
        assert!(
            (exact - fd).norm() < 1e-5 * (1.0 + exact.norm()),
            "alpha={alpha:?} xi={xi}: {exact} vs {fd}"
        );
    }
}

/// Quadrature is additive across random interior split points.
#[test]
fn quadrature_additive_at_random_splits() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let f = |x: &[f64]| Scalar::new((4.0 * x[0]).cos() * (-x[0] * x[0]).exp(), 0.0);
    let whole = integrate_cells(&f, &[Cell::new(vec![-2.0], vec![2.0])], &cfg()).unwrap();
    for _ in 0..8 {
        let s: f64 = rng.gen_range(-1.9..1.9);
        let left = integrate_cells(&f, &[Cell::new(vec![-2.0], vec![s])], &cfg()).unwrap();
        let right = integrate_cells(&f, &[Cell::new(vec![s], vec![2.0])], &cfg()).unwrap();
        assert_relative_eq!(
            whole.value.re,
            left.value.re + right.value.re,
            max_relative = 1e-10,
            epsilon = 1e-12
        );
    }
}
