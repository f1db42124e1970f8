//! Distributions as finite sums of typed atoms: densities, derivatives of
//! densities, Euler derivatives of densities, and point masses.
//!
//! The pairing `⟨T, φ⟩` is implemented per atom type; derivative atoms move
//! their derivatives onto the test function with the usual signs, Euler atoms
//! through the exact adjoint from [`crate::euler`].

use crate::bump::TestFunction;
use crate::error::Error;
use crate::euler::EulerOperator;
use crate::multi_index::MultiIndex;
use crate::quad::{integrate_cells, PairingConfig, QuadResult};
use crate::region::{Cell, Region};
use crate::{Result, Scalar};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// A scalar field, total on all of `ℝ^d`.  Fields must vanish outside their
/// declared support by construction; the support region is used for clipping
/// and truncation, never for masking.
pub type Field = Arc<dyn Fn(&[f64]) -> Scalar + Send + Sync>;

/// A declared decay certificate: `|t(x)| ≤ bound · max(1, |x|_∞)^{-exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    pub exponent: i32,
    pub bound: f64,
}

/// A regular distribution `t(x) dx`.
#[derive(Clone)]
pub struct DensityAtom {
    pub field: Field,
    pub support: Region,
    pub decay: Option<Decay>,
}

impl core::fmt::Debug for DensityAtom {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("DensityAtom")
            .field("support", &self.support)
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

impl DensityAtom {
    pub fn new(field: Field, support: Region, decay: Option<Decay>) -> Self {
        DensityAtom {
            field,
            support,
            decay,
        }
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn eval(&self, x: &[f64]) -> Scalar {
        (self.field)(x)
    }

    /// The dilated density `x ↦ t(a∘x)`; the Jacobian of the defining
    /// formula cancels exactly against `σ(a)`.
    pub fn dilate(&self, a: &[f64]) -> Result<DensityAtom> {
        if a.contains(&0.0) {
            return Err(Error::ZeroCoordinate);
        }
        let support = self.support.dilate_cover(a)?;
        let a_owned: Vec<f64> = a.to_vec();
        let inner = self.field.clone();
        let field: Field = Arc::new(move |x: &[f64]| {
            let scaled: Vec<f64> = x.iter().zip(&a_owned).map(|(xj, aj)| xj * aj).collect();
            inner(&scaled)
        });
        let decay = self.decay.map(|d| {
            let amin = a.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            let amax = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let factor = if d.exponent >= 0 {
                amin.min(1.0).powi(-d.exponent)
            } else {
                amax.max(1.0).powi(-d.exponent)
            };
            Decay {
                exponent: d.exponent,
                bound: d.bound * factor,
            }
        });
        Ok(DensityAtom {
            field,
            support,
            decay,
        })
    }
}

/// One summand of a distribution.
#[derive(Debug, Clone)]
pub enum Atom {
    /// `t(x) dx`.
    Density(DensityAtom),
    /// `coeff · ∂^β t`.
    Deriv {
        beta: MultiIndex,
        coeff: Scalar,
        base: DensityAtom,
    },
    /// `coeff · θ^β t`.
    Euler {
        beta: MultiIndex,
        coeff: Scalar,
        base: DensityAtom,
    },
    /// `coeff · δ_location^{(β)}`.
    Point {
        location: Vec<f64>,
        beta: MultiIndex,
        coeff: Scalar,
    },
}

impl Atom {
    pub fn dim(&self) -> usize {
        match self {
            Atom::Density(b) => b.dim(),
            Atom::Deriv { base, .. } | Atom::Euler { base, .. } => base.dim(),
            Atom::Point { location, .. } => location.len(),
        }
    }

    /// The declared support of the atom.
    pub fn support_region(&self) -> Region {
        match self {
            Atom::Density(b) => b.support.clone(),
            Atom::Deriv { base, .. } | Atom::Euler { base, .. } => base.support.clone(),
            Atom::Point { location, .. } => {
                Region::Cell(Cell::new(location.clone(), location.clone()))
            }
        }
    }

    /// `⟨atom, φ⟩` with quadrature restricted to `supp φ`.
    pub fn pair(&self, phi: &TestFunction, cfg: &PairingConfig) -> Result<QuadResult> {
        assert_eq!(self.dim(), phi.dim());
        let clip = phi.support_cell();
        match self {
            Atom::Density(b) => {
                let cells = b.support.clipped_cells(&clip);
                integrate_cells(&|x| b.eval(x) * phi.eval(x), &cells, cfg)
            }
            Atom::Deriv { beta, coeff, base } => {
                let sign = if beta.order() % 2 == 0 { 1.0 } else { -1.0 };
                let cells = base.support.clipped_cells(&clip);
                let f = |x: &[f64]| base.eval(x) * phi.eval_derivative(beta, x);
                let mut r = integrate_cells(&f, &cells, cfg)?;
                r.value *= coeff * sign;
                r.error_bound *= coeff.norm();
                Ok(r)
            }
            Atom::Euler { beta, coeff, base } => {
                // ⟨θ^β t, φ⟩ = ∫ t · (θ*)^β φ
                let adjoint = EulerOperator::theta_pow(beta).adjoint().to_xd_form();
                let cells = base.support.clipped_cells(&clip);
                let f = |x: &[f64]| base.eval(x) * adjoint.apply(phi, x);
                let mut r = integrate_cells(&f, &cells, cfg)?;
                r.value *= coeff;
                r.error_bound *= coeff.norm();
                Ok(r)
            }
            Atom::Point {
                location,
                beta,
                coeff,
            } => {
                let sign = if beta.order() % 2 == 0 { 1.0 } else { -1.0 };
                Ok(QuadResult {
                    value: coeff * sign * phi.eval_derivative(beta, location),
                    error_bound: 0.0,
                    subdivisions: 0,
                })
            }
        }
    }

    /// The closed-form dilation `D_a` of this atom.
    pub fn dilate(&self, a: &[f64]) -> Result<Atom> {
        assert_eq!(a.len(), self.dim());
        if a.contains(&0.0) {
            return Err(Error::ZeroCoordinate);
        }
        Ok(match self {
            Atom::Density(b) => Atom::Density(b.dilate(a)?),
            // D_a ∂^β t = a^{-β} ∂^β (t ∘ a): moving the derivatives through
            // the substitution costs one chain-rule factor per order
            Atom::Deriv { beta, coeff, base } => {
                let mut factor = 1.0;
                for (j, &aj) in a.iter().enumerate() {
                    factor *= aj.powi(-(beta.get(j) as i32));
                }
                Atom::Deriv {
                    beta: beta.clone(),
                    coeff: coeff * factor,
                    base: base.dilate(a)?,
                }
            }
            // θ_j commutes with dilations
            Atom::Euler { beta, coeff, base } => Atom::Euler {
                beta: beta.clone(),
                coeff: *coeff,
                base: base.dilate(a)?,
            },
            Atom::Point {
                location,
                beta,
                coeff,
            } => {
                let jacobian: f64 = a.iter().map(|v| v.abs()).product();
                let mut factor = 1.0 / jacobian;
                for (j, &aj) in a.iter().enumerate() {
                    factor *= aj.powi(-(beta.get(j) as i32));
                }
                Atom::Point {
                    location: location.iter().zip(a).map(|(b, aj)| b / aj).collect(),
                    beta: beta.clone(),
                    coeff: coeff * factor,
                }
            }
        })
    }

    /// The atom scaled by a constant factor.
    pub fn scaled(&self, factor: Scalar) -> Atom {
        match self {
            Atom::Density(b) => {
                let inner = b.field.clone();
                let field: Field = Arc::new(move |x: &[f64]| factor * inner(x));
                Atom::Density(DensityAtom {
                    field,
                    support: b.support.clone(),
                    decay: b.decay.map(|d| Decay {
                        exponent: d.exponent,
                        bound: d.bound * factor.norm(),
                    }),
                })
            }
            Atom::Deriv { beta, coeff, base } => Atom::Deriv {
                beta: beta.clone(),
                coeff: coeff * factor,
                base: base.clone(),
            },
            Atom::Euler { beta, coeff, base } => Atom::Euler {
                beta: beta.clone(),
                coeff: coeff * factor,
                base: base.clone(),
            },
            Atom::Point {
                location,
                beta,
                coeff,
            } => Atom::Point {
                location: location.clone(),
                beta: beta.clone(),
                coeff: coeff * factor,
            },
        }
    }

    /// Rewrite `coeff·∂^β t` as a sum of Euler atoms `coeff·c_γ θ^γ τ` with
    /// `τ = t/x^β`, valid when the support keeps distance `ε > 0` from the
    /// hyperplanes.  Uses `∂^β t = (x^β τ)^{(β)}` and the expansion of
    /// `f ↦ (x^β f)^{(β)}` as a polynomial in the `θ_j`.
    pub fn to_euler_form(&self) -> Result<Vec<Atom>> {
        let (beta, coeff, base) = match self {
            Atom::Deriv { beta, coeff, base } => (beta, coeff, base),
            Atom::Euler { .. } => return Ok(vec![self.clone()]),
            _ => return Err(Error::NotADerivAtom),
        };
        let eps = base.support.hyperplane_distance();
        if eps <= 0.0 {
            return Err(Error::SupportTouchesHyperplane);
        }
        let tau = divide_by_monomial(base, beta, eps);
        let op = EulerOperator::power_shift(beta);
        let mut out = Vec::new();
        for (gamma, c) in op.coeffs() {
            let cf = num_traits::ToPrimitive::to_f64(c).expect("small integer coefficient");
            out.push(Atom::Euler {
                beta: gamma.clone(),
                coeff: coeff * cf,
                base: tau.clone(),
            });
        }
        Ok(out)
    }
}

/// `τ = t / x^β` with the decay certificate adjusted: on `W_ε` the factor
/// `x^{-β}` costs at most `ε^{-(|β| - β_min)}` in the bound and gains at
/// least `β_min` in the tail exponent (the escaping axis carries `β_min` or
/// more).
fn divide_by_monomial(base: &DensityAtom, beta: &MultiIndex, eps: f64) -> DensityAtom {
    let inner = base.field.clone();
    let b = beta.clone();
    let field: Field = Arc::new(move |x: &[f64]| {
        if x.contains(&0.0) {
            return Scalar::new(0.0, 0.0);
        }
        let mut v = inner(x);
        for (j, &xj) in x.iter().enumerate() {
            v *= xj.powi(-(b.get(j) as i32));
        }
        v
    });
    let beta_min = beta.components().iter().copied().min().unwrap_or(0);
    let eps_eff = eps.min(1.0);
    let decay = base.decay.map(|d| Decay {
        exponent: d.exponent + beta_min as i32,
        bound: d.bound * eps_eff.powi(-((beta.order() - beta_min) as i32)),
    });
    DensityAtom {
        field,
        support: base.support.clone(),
        decay,
    }
}

/// A finite sum of atoms.
#[derive(Debug, Clone)]
pub struct Distribution {
    dim: usize,
    atoms: Vec<Atom>,
}

impl Distribution {
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Self {
        assert!(atoms.iter().all(|a| a.dim() == dim));
        Distribution { dim, atoms }
    }

    pub fn from_atom(atom: Atom) -> Self {
        let dim = atom.dim();
        Distribution {
            dim,
            atoms: vec![atom],
        }
    }

    /// `δ_a`.
    pub fn delta(location: Vec<f64>) -> Self {
        let dim = location.len();
        Distribution::new(
            dim,
            vec![Atom::Point {
                location,
                beta: MultiIndex::zeros(dim),
                coeff: Scalar::new(1.0, 0.0),
            }],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `⟨T, φ⟩`, summed over atoms; error bounds add.
    pub fn pair(&self, phi: &TestFunction, cfg: &PairingConfig) -> Result<QuadResult> {
        let mut acc = QuadResult::zero();
        for atom in &self.atoms {
            acc.accumulate(&atom.pair(phi, cfg)?);
        }
        Ok(acc)
    }

    /// `D_a T` in closed form.
    pub fn dilate(&self, a: &[f64]) -> Result<Distribution> {
        let atoms = self
            .atoms
            .iter()
            .map(|atom| atom.dilate(a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Distribution {
            dim: self.dim,
            atoms,
        })
    }

    /// The distribution scaled by a constant factor.
    pub fn scaled(&self, factor: Scalar) -> Distribution {
        Distribution {
            dim: self.dim,
            atoms: self.atoms.iter().map(|a| a.scaled(factor)).collect(),
        }
    }

    /// The largest `ε` with every atom support inside `W_ε`, or `None` when
    /// some atom touches a coordinate hyperplane.
    pub fn support_in_w_eps(&self) -> Option<f64> {
        let mut eps = f64::INFINITY;
        for atom in &self.atoms {
            let d = atom.support_region().hyperplane_distance();
            if d <= 0.0 {
                return None;
            }
            eps = eps.min(d);
        }
        Some(eps)
    }

    /// Rewrite every derivative atom in Euler form (density and point atoms
    /// pass through unchanged).
    pub fn to_euler_form(&self) -> Result<Distribution> {
        let mut atoms = Vec::new();
        for atom in &self.atoms {
            match atom {
                Atom::Deriv { .. } => atoms.extend(atom.to_euler_form()?),
                other => atoms.push(other.clone()),
            }
        }
        Ok(Distribution {
            dim: self.dim,
            atoms,
        })
    }

    /// The mollification `T * χ_ε` as a lazily evaluated density,
    /// `x ↦ ⟨T, χ_ε(x - ·)⟩` with `χ_ε = ε^{-d} χ(·/ε)`.
    pub fn regularize(
        &self,
        mollifier: &TestFunction,
        eps: f64,
        cfg: &PairingConfig,
    ) -> DensityAtom {
        assert!(eps > 0.0);
        let scaled = mollifier.scaled_mollifier(eps);
        let this = self.clone();
        let cfg = cfg.clone();
        let field: Field = Arc::new(move |x: &[f64]| {
            let kernel = scaled.reflected_translate(x);
            this.pair(&kernel, &cfg)
                .map(|r| r.value)
                .unwrap_or(Scalar::new(f64::NAN, f64::NAN))
        });
        // support grows by the mollifier radius
        let radius = {
            let s = mollifier.support_cell();
            s.lo.iter()
                .chain(&s.hi)
                .fold(0.0f64, |m, v| m.max(v.abs()))
                * eps
        };
        let support = self
            .atoms
            .iter()
            .map(|a| a.support_region().grow(radius))
            .reduce(|acc, r| union_cover(&acc, &r))
            .unwrap_or(Region::All { dim: self.dim });
        DensityAtom {
            field,
            support,
            decay: None,
        }
    }
}

/// A region covering the union of two regions (bounding cell; `All` when
/// either side is unbounded in a way a cell cannot express).
fn union_cover(a: &Region, b: &Region) -> Region {
    let cells_a = a.cells();
    let cells_b = b.cells();
    let dim = a.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for c in cells_a.iter().chain(&cells_b) {
        for j in 0..dim {
            lo[j] = lo[j].min(c.lo[j]);
            hi[j] = hi[j].max(c.hi[j]);
        }
    }
    Region::Cell(Cell::new(lo, hi))
}

/// Report of the boundedness check behind the weighted-density membership
/// predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub weight_order: i32,
    pub empirical_sup: f64,
    pub threshold: Option<f64>,
    pub pass: bool,
}

/// Sample `sup (1+|x|²)^{k/2} |t(x)|` over a log-spaced grid and compare with
/// the declared decay certificate.  Without a certificate of exponent `≥ k`
/// the check fails (reporting the empirical sup seen).
pub fn weighted_boundedness_check(
    atom: &DensityAtom,
    k: i32,
    samples_per_decade: usize,
) -> MembershipReport {
    let dim = atom.dim();
    let mut sup = 0.0f64;
    // radii log-spaced over [1e-2, 1e6], each combined with sign patterns and
    // a few direction mixes
    let decades = 8;
    for i in 0..=(decades * samples_per_decade) {
        let r = 1e-2 * 10f64.powf(i as f64 / samples_per_decade as f64);
        for signs in 0..(1usize << dim) {
            for skew in [1.0, 0.37] {
                let mut x = vec![0.0; dim];
                for (j, xj) in x.iter_mut().enumerate() {
                    let s = if signs >> j & 1 == 1 { -1.0 } else { 1.0 };
                    *xj = s * r * if j % 2 == 0 { 1.0 } else { skew };
                }
                if !atom.support.contains(&x) {
                    continue;
                }
                let norm_sq: f64 = x.iter().map(|v| v * v).sum();
                let w = (1.0 + norm_sq).powf(k as f64 / 2.0);
                sup = sup.max(w * atom.eval(&x).norm());
            }
        }
    }
    let threshold = atom.decay.and_then(|d| {
        if d.exponent >= k {
            // (1+|x|²)^{k/2} ≤ (1+d)^{k/2} max(1,|x|_∞)^k
            Some(d.bound * (1.0 + dim as f64).powf(k as f64 / 2.0))
        } else {
            None
        }
    });
    let pass = match threshold {
        Some(t) => sup <= t * (1.0 + 1e-12),
        None => false,
    };
    MembershipReport {
        weight_order: k,
        empirical_sup: sup,
        threshold,
        pass,
    }
}

// ---------------------------------------------------------------------------
// Catalog of concrete densities used across examples and tests.
// ---------------------------------------------------------------------------

/// The indicator density of a cell.
pub fn indicator(lo: Vec<f64>, hi: Vec<f64>) -> DensityAtom {
    let cell = Cell::new(lo, hi);
    let inner = cell.clone();
    let field: Field = Arc::new(move |x: &[f64]| {
        if inner.contains(x) {
            Scalar::new(1.0, 0.0)
        } else {
            Scalar::new(0.0, 0.0)
        }
    });
    DensityAtom {
        field,
        support: Region::Cell(cell),
        decay: None,
    }
}

/// `exp(-1/t)` for `t > 0`, zero otherwise — the flat building block of
/// smooth cutoffs.
pub fn flat_exp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        num_traits::Float::exp(-1.0 / t)
    }
}

/// Smooth monotone step: `0` for `t ≤ 0`, `1` for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    let a = flat_exp(t);
    let b = flat_exp(1.0 - t);
    if a == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// A smooth cutoff `χ` of one variable with `χ ≡ 1` on `[-r0, r0]` and
/// `χ ≡ 0` outside `(-r1, r1)`.
pub fn cutoff_near_zero(r0: f64, r1: f64, u: f64) -> f64 {
    assert!(0.0 < r0 && r0 < r1);
    smooth_step((r1 - u.abs()) / (r1 - r0))
}
