//! Concrete kernels and densities used by the verification suites and the
//! spec-file builtins.

use hadamard_core::bump::psi_derivative;
use hadamard_core::dist::{cutoff_near_zero, flat_exp, indicator};
use hadamard_core::{
    Atom, BumpTerm, Decay, DensityAtom, Distribution, EulerOperator, MultiIndex, Region, Scalar,
    TestFunction,
};
use num_traits::ToPrimitive;
use std::sync::Arc;

/// `e^{-ix}` as a complex scalar.
fn osc(x: f64) -> Scalar {
    Scalar::new(x.cos(), -x.sin())
}

/// The smooth cutoff `χ(x) = ψ(x)/ψ(0)`: equal to `1` at `0` with
/// `1 - χ(x) = x² + O(x⁴)`, supported in `[-1, 1]`; all derivatives exact.
fn chi(order: usize, x: f64) -> f64 {
    psi_derivative(order, x) * core::f64::consts::E
}

/// `(χ(x) - 1)/x²` extended continuously through `0` (value `-1` there).
fn chi_minus_one_over_x2(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let v = x * x / (1.0 - x * x);
        let w = if v > 1e-14 { (-v).exp_m1() / v } else { -1.0 + v / 2.0 };
        w / (1.0 - x * x)
    } else {
        (chi(0, x) - 1.0) / (x * x)
    }
}

/// The indicator density of `[1,2]` — the workhorse kernel of the suites.
pub fn indicator_12() -> Distribution {
    Distribution::from_atom(Atom::Density(indicator(vec![1.0], vec![2.0])))
}

/// The indicator density of the box `[1,2]^2`.
pub fn indicator_box_2d() -> DensityAtom {
    indicator(vec![1.0, 1.0], vec![2.0, 2.0])
}

/// The monomial density `x^α` on the symmetric box `B_r` (a stand-in for the
/// monomial when paired against compactly supported test functions).
pub fn monomial_density(alpha: &MultiIndex, r: f64) -> DensityAtom {
    let a = alpha.clone();
    let dim = alpha.dim();
    let radius = vec![r; dim];
    let rr = radius.clone();
    DensityAtom::new(
        Arc::new(move |x: &[f64]| {
            if x.iter().zip(&rr).any(|(xj, rj)| xj.abs() > *rj) {
                Scalar::new(0.0, 0.0)
            } else {
                Scalar::new(a.monomial(x), 0.0)
            }
        }),
        Region::sym_box(radius),
        None,
    )
}

/// `x · 1_{[1,2]}(x)`, the base of the derivative kernel `-(xτ)'`.
pub fn x_times_indicator_12() -> DensityAtom {
    DensityAtom::new(
        Arc::new(|x: &[f64]| {
            if (1.0..=2.0).contains(&x[0]) {
                Scalar::new(x[0], 0.0)
            } else {
                Scalar::new(0.0, 0.0)
            }
        }),
        Region::cell(vec![1.0], vec![2.0]),
        None,
    )
}

/// The derivative kernel `-(xτ)'` with `τ = 1_{[1,2]}`; its eigenvalues are
/// `-(α+1)!/α! · m_α(τ)`.
pub fn derivative_kernel() -> Distribution {
    Distribution::from_atom(Atom::Deriv {
        beta: MultiIndex::new(vec![1]),
        coeff: Scalar::new(-1.0, 0.0),
        base: x_times_indicator_12(),
    })
}

/// The oscillatory exponential kernel `T = e^{-ix}` (d = 1) in its
/// Euler-derivative form.
///
/// With `t₂(x) = (χ(x) - 1) e^{-ix}/x²` (bounded, `|t₂| ≤ 2·max(1,|x|)^{-2}`)
/// the classical identity `(x² t₂)'' = e^{-ix} + g` holds, where
/// `g = (χ'' - 2iχ' - χ) e^{-ix}` is supported in `[-1,1]`.  Expanding
/// `f ↦ (x²f)''` as `θ² + 3θ + 2` gives the atom list
/// `θ²t₂ + 3θt₂ + 2t₂ - g`.
pub fn oscillatory_kernel() -> Distribution {
    let t2: hadamard_core::dist::Field =
        Arc::new(|x: &[f64]| chi_minus_one_over_x2(x[0]) * osc(x[0]));
    let base = DensityAtom::new(
        t2,
        Region::All { dim: 1 },
        Some(Decay {
            exponent: 2,
            bound: 2.0,
        }),
    );
    let shift = EulerOperator::power_shift(&MultiIndex::new(vec![2]));
    let mut atoms: Vec<Atom> = shift
        .coeffs()
        .iter()
        .map(|(gamma, c)| Atom::Euler {
            beta: gamma.clone(),
            coeff: Scalar::new(c.to_f64().expect("small integer"), 0.0),
            base: base.clone(),
        })
        .collect();
    // minus the compact remainder g
    atoms.push(Atom::Density(DensityAtom::new(
        Arc::new(|x: &[f64]| {
            let u = x[0];
            let g = Scalar::new(chi(2, u) - chi(0, u), -2.0 * chi(1, u));
            -(g * osc(u))
        }),
        Region::cell(vec![-1.0], vec![1.0]),
        None,
    )));
    Distribution::new(1, atoms)
}

/// The base density `t₂` of [`oscillatory_kernel`], exposed so its declared
/// decay certificate can be checked empirically.
pub fn oscillatory_base() -> DensityAtom {
    DensityAtom::new(
        Arc::new(|x: &[f64]| chi_minus_one_over_x2(x[0]) * osc(x[0])),
        Region::All { dim: 1 },
        Some(Decay {
            exponent: 2,
            bound: 2.0,
        }),
    )
}

/// The half-line indicator `1_{[1,∞)}` — integrable against every test
/// function but with a scaling action unbounded near `0`, and no decay
/// witness.
pub fn half_line_kernel() -> Distribution {
    Distribution::from_atom(Atom::Density(DensityAtom::new(
        Arc::new(|x: &[f64]| {
            if x[0] >= 1.0 {
                Scalar::new(1.0, 0.0)
            } else {
                Scalar::new(0.0, 0.0)
            }
        }),
        Region::cell(vec![1.0], vec![f64::INFINITY]),
        None,
    )))
}

/// The ramp density `t_p(x) = χ(x) x^p / p!` on `[0,1]` (cutoff `≡ 1` on
/// `[0, 1/2]`): the weight `|x|^{-(p+1)}` is exactly the first non-integrable
/// one.
pub fn ramp_density(p: u32) -> Distribution {
    let fact: f64 = (1..=p).map(|k| k as f64).product::<f64>().max(1.0);
    Distribution::from_atom(Atom::Density(DensityAtom::new(
        Arc::new(move |x: &[f64]| {
            if x[0] >= 0.0 {
                Scalar::new(
                    x[0].powi(p as i32) / fact * cutoff_near_zero(0.5, 1.0, x[0]),
                    0.0,
                )
            } else {
                Scalar::new(0.0, 0.0)
            }
        }),
        Region::cell(vec![0.0], vec![1.0]),
        None,
    )))
}

/// A density vanishing flatly at `0`: every weight `|x|^{-γ}` stays
/// integrable.
pub fn flat_density() -> Distribution {
    Distribution::from_atom(Atom::Density(DensityAtom::new(
        Arc::new(|x: &[f64]| {
            if x[0] > 0.0 && x[0] <= 1.0 {
                Scalar::new(flat_exp(x[0]), 0.0)
            } else {
                Scalar::new(0.0, 0.0)
            }
        }),
        Region::cell(vec![0.0], vec![1.0]),
        None,
    )))
}

/// `e^{iπx²}`.
fn quadratic_phase(x: f64) -> Scalar {
    let p = core::f64::consts::PI * x * x;
    Scalar::new(p.cos(), p.sin())
}

/// Pieces of the integration-by-parts witness for the quadratic-phase
/// density: with `χ` as above and `c(x) = (1-χ(x))/(2πix)`,
///
/// `(1-χ) e^{iπx²} = (c e^{iπx²})' − c'(x) e^{iπx²}`.
///
/// Returned as `(direct, b, remainder)` where `direct = (1-χ)e^{iπx²}`,
/// `b = c e^{iπx²}` (bounded by `1/(π·max(1,|x|))`) and
/// `remainder = c' e^{iπx²}`.
pub fn quadratic_phase_witness() -> (DensityAtom, DensityAtom, DensityAtom) {
    let direct = DensityAtom::new(
        Arc::new(|x: &[f64]| (1.0 - chi(0, x[0])) * quadratic_phase(x[0])),
        Region::All { dim: 1 },
        None,
    );
    // c(x) = (1-χ)/(2πix) = -i(1-χ)/(2πx); continuous through 0 (value 0)
    let c_field = |u: f64| -> Scalar {
        let ratio = if u == 0.0 {
            0.0
        } else {
            -u * chi_minus_one_over_x2(u) // (1-χ)/x
        };
        Scalar::new(0.0, -1.0) * (ratio / (2.0 * core::f64::consts::PI))
    };
    let b = DensityAtom::new(
        Arc::new(move |x: &[f64]| c_field(x[0]) * quadratic_phase(x[0])),
        Region::All { dim: 1 },
        Some(Decay {
            exponent: 1,
            bound: core::f64::consts::FRAC_1_PI,
        }),
    );
    // c'(x) = i (χ'(x)·x + 1 - χ(x)) / (2π x²), value -i/(2π) at 0
    let remainder = DensityAtom::new(
        Arc::new(|x: &[f64]| {
            let u = x[0];
            let ratio = if u == 0.0 {
                -1.0
            } else {
                (chi(1, u) * u + 1.0 - chi(0, u)) / (u * u)
            };
            Scalar::new(0.0, ratio / (2.0 * core::f64::consts::PI)) * quadratic_phase(u)
        }),
        Region::All { dim: 1 },
        None,
    );
    (direct, b, remainder)
}

/// A single positive bump, the default test function of the suites.
pub fn bump(center: f64, scale: f64) -> TestFunction {
    TestFunction::new(vec![BumpTerm {
        coeff: 1.0,
        gamma: MultiIndex::zeros(1),
        center: vec![center],
        scale: vec![scale],
    }])
}

/// A 2-d bump with distinct per-axis centers and scales.
pub fn bump_2d(center: [f64; 2], scale: [f64; 2]) -> TestFunction {
    TestFunction::new(vec![BumpTerm {
        coeff: 1.0,
        gamma: MultiIndex::zeros(2),
        center: center.to_vec(),
        scale: scale.to_vec(),
    }])
}

/// The odd-moment bump `(x - c)ψ((x - c)/s)`: integral exactly `0`.
pub fn odd_bump(center: f64, scale: f64) -> TestFunction {
    TestFunction::new(vec![BumpTerm {
        coeff: 1.0,
        gamma: MultiIndex::new(vec![1]),
        center: vec![center],
        scale: vec![scale],
    }])
}

/// The d = 1 kernel catalog paired with human-readable names.
pub fn catalog_1d() -> Vec<(&'static str, Distribution)> {
    vec![
        ("delta_1.3", Distribution::delta(vec![1.3])),
        ("delta_-0.7", Distribution::delta(vec![-0.7])),
        ("indicator_[1,2]", indicator_12()),
        (
            "deriv_indicator",
            Distribution::from_atom(Atom::Deriv {
                beta: MultiIndex::new(vec![1]),
                coeff: Scalar::new(1.0, 0.0),
                base: indicator(vec![1.0], vec![2.0]),
            }),
        ),
        (
            "euler_indicator",
            Distribution::from_atom(Atom::Euler {
                beta: MultiIndex::new(vec![1]),
                coeff: Scalar::new(1.0, 0.0),
                base: indicator(vec![-2.0], vec![-1.0]),
            }),
        ),
        (
            "point_derivative",
            Distribution::from_atom(Atom::Point {
                location: vec![1.2],
                beta: MultiIndex::new(vec![1]),
                coeff: Scalar::new(0.7, 0.2),
            }),
        ),
    ]
}
