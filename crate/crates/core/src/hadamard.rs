//! The multiplicative operator calculus: the scaling action
//! `(Mφ)(y) = T_x φ(xy)`, the star convolution `(S⋆T)φ = S_y(T_x φ(xy))`,
//! the eigenvalue family `m_α = T(σ(x)/x^{α+𝟙})`, the reflected kernel, the
//! factorization through it, and the extendability report.

use crate::bump::TestFunction;
use crate::dist::{Atom, DensityAtom, Distribution, Field};
use crate::error::Error;
use crate::euler::EulerOperator;
use crate::multi_index::{factorial_ratio_f64, MultiIndex};
use crate::quad::{integrate_cells, tail_radius, truncate_cell, PairingConfig, QuadResult};
use crate::region::{sigma, Cell, Region};
use crate::{Result, Scalar};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
#[allow(unused_imports)]
use num_traits::Float;

/// What makes a kernel usable: positive distance to the hyperplanes, plus a
/// decay certificate whenever some atom has unbounded support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub eps: f64,
    /// Weakest declared decay exponent among unbounded atoms; `None` when
    /// every atom has bounded support.
    pub decay_exponent: Option<i32>,
}

/// Check the kernel gate: support inside some `W_ε` and decay declared where
/// needed.
pub fn certify(t: &Distribution) -> Result<Certificate> {
    let eps = t
        .support_in_w_eps()
        .ok_or(Error::SupportTouchesHyperplane)?;
    let mut decay_exponent: Option<i32> = None;
    for atom in t.atoms() {
        let region = atom.support_region();
        if region.cells().iter().all(|c| c.is_bounded()) {
            continue;
        }
        let base = match atom {
            Atom::Density(b) => b,
            Atom::Deriv { base, .. } | Atom::Euler { base, .. } => base,
            Atom::Point { .. } => unreachable!("point atoms are bounded"),
        };
        let d = base.decay.ok_or(Error::MissingDecayBound)?;
        decay_exponent = Some(match decay_exponent {
            Some(e) => e.min(d.exponent),
            None => d.exponent,
        });
    }
    Ok(Certificate {
        eps,
        decay_exponent,
    })
}

/// The cell `{x : x∘y ∈ target}`, or `None` when it is empty (the scaled
/// test function vanishes identically).  Axes with `y_j = 0` become
/// unconstrained when `0` lies in the target interval.
fn scale_constraint_cell(target: &Cell, y: &[f64]) -> Option<Cell> {
    let dim = target.dim();
    let mut lo = Vec::with_capacity(dim);
    let mut hi = Vec::with_capacity(dim);
    for j in 0..dim {
        if y[j] != 0.0 {
            let (a, b) = (target.lo[j] / y[j], target.hi[j] / y[j]);
            lo.push(a.min(b));
            hi.push(a.max(b));
        } else if target.lo[j] <= 0.0 && 0.0 <= target.hi[j] {
            lo.push(f64::NEG_INFINITY);
            hi.push(f64::INFINITY);
        } else {
            return None;
        }
    }
    Some(Cell::new(lo, hi))
}

/// Coarse upper estimate of `sup_u |Σ_δ c_δ u^δ φ^{(δ)}(u)|` over the support
/// of `φ`, used only to size truncation radii.
fn integrand_sup(phi: &TestFunction, terms: &[(MultiIndex, f64)]) -> f64 {
    let cell = phi.support_cell();
    let dim = cell.dim();
    let n = 33usize;
    let mut sup = 0.0f64;
    let total = n.pow(dim as u32);
    let mut u = vec![0.0; dim];
    for idx in 0..total {
        let mut rest = idx;
        for j in 0..dim {
            let i = rest % n;
            rest /= n;
            u[j] = cell.lo[j] + (cell.hi[j] - cell.lo[j]) * (i as f64 + 0.5) / n as f64;
        }
        let mut v = 0.0;
        for (delta, c) in terms {
            v += c.abs() * delta.monomial(&u).abs() * phi.eval_derivative(delta, &u).abs();
        }
        sup = sup.max(v);
    }
    2.0 * sup
}

/// Cells over which a density atom must be integrated when paired with
/// `φ(·∘y)`; unbounded cells (hyperplane axes) are truncated using the decay
/// certificate.
fn mt_cells(
    base: &DensityAtom,
    constraint: &Cell,
    sup_factor: f64,
    cfg: &PairingConfig,
) -> Result<Vec<Cell>> {
    let cells = base.support.clipped_cells(constraint);
    if cells.iter().all(|c| c.is_bounded()) {
        return Ok(cells);
    }
    let decay = base.decay.ok_or(Error::HyperplaneWithoutWitness)?;
    if decay.exponent < 2 {
        return Err(Error::InsufficientDecay {
            needed: 2,
            declared: decay.exponent,
        });
    }
    let radius = match cfg.truncation_radius {
        Some(r) => r,
        None => tail_radius(
            decay.exponent as f64,
            decay.bound * sup_factor.max(1.0),
            cfg.abs_tol,
        )?,
    };
    Ok(cells.iter().map(|c| truncate_cell(c, radius)).collect())
}

/// `T_x φ(x∘y)` for a single atom; valid on and off the coordinate
/// hyperplanes (hyperplane axes need decay as per [`mt_cells`]).
fn mt_atom(
    atom: &Atom,
    phi: &TestFunction,
    y: &[f64],
    cfg: &PairingConfig,
) -> Result<QuadResult> {
    let phi_cell = phi.support_cell();
    match atom {
        Atom::Point {
            location,
            beta,
            coeff,
        } => {
            let sign = if beta.order() % 2 == 0 { 1.0 } else { -1.0 };
            let ypow = beta.monomial(y);
            let u: Vec<f64> = location.iter().zip(y).map(|(a, b)| a * b).collect();
            Ok(QuadResult {
                value: coeff * sign * ypow * phi.eval_derivative(beta, &u),
                error_bound: 0.0,
                subdivisions: 0,
            })
        }
        Atom::Density(base) => {
            let Some(constraint) = scale_constraint_cell(&phi_cell, y) else {
                return Ok(QuadResult::zero());
            };
            let sup = integrand_sup(phi, &[(MultiIndex::zeros(base.dim()), 1.0)]);
            let cells = mt_cells(base, &constraint, sup, cfg)?;
            let f = |x: &[f64]| {
                let u: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
                base.eval(x) * phi.eval(&u)
            };
            integrate_cells(&f, &cells, cfg)
        }
        Atom::Deriv { beta, coeff, base } => {
            // ⟨∂^β t, φ(·∘y)⟩ = (-1)^{|β|} y^β ∫ t(x) φ^{(β)}(x∘y) dx
            let sign = if beta.order() % 2 == 0 { 1.0 } else { -1.0 };
            let prefactor = coeff * sign * beta.monomial(y);
            if prefactor == Scalar::new(0.0, 0.0) {
                return Ok(QuadResult::zero());
            }
            let Some(constraint) = scale_constraint_cell(&phi_cell, y) else {
                return Ok(QuadResult::zero());
            };
            let sup = integrand_sup(phi, &[(beta.clone(), 1.0)]);
            let cells = mt_cells(base, &constraint, sup, cfg)?;
            let f = |x: &[f64]| {
                let u: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
                base.eval(x) * phi.eval_derivative(beta, &u)
            };
            let mut r = integrate_cells(&f, &cells, cfg)?;
            r.value *= prefactor;
            r.error_bound *= prefactor.norm();
            Ok(r)
        }
        Atom::Euler { beta, coeff, base } => {
            // θ_{j,x} φ(x∘y) = (θ_j φ)(x∘y), so the adjoint acts on φ alone:
            // integrand t(x) · Σ_δ a_δ (x∘y)^δ φ^{(δ)}(x∘y)
            let adjoint = EulerOperator::theta_pow(beta).adjoint().to_xd_form();
            let terms = adjoint.terms_f64();
            let Some(constraint) = scale_constraint_cell(&phi_cell, y) else {
                return Ok(QuadResult::zero());
            };
            let sup = integrand_sup(phi, &terms);
            let cells = mt_cells(base, &constraint, sup, cfg)?;
            let f = |x: &[f64]| {
                let u: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
                let mut a = 0.0;
                for (delta, c) in &terms {
                    a += c * delta.monomial(&u) * phi.eval_derivative(delta, &u);
                }
                base.eval(x) * a
            };
            let mut r = integrate_cells(&f, &cells, cfg)?;
            r.value *= coeff;
            r.error_bound *= coeff.norm();
            Ok(r)
        }
    }
}

/// The scaling action `(Mφ)(y) = T_x φ(x∘y)`.
pub fn apply_multiplicative(
    t: &Distribution,
    phi: &TestFunction,
    y: &[f64],
    cfg: &PairingConfig,
) -> Result<QuadResult> {
    assert_eq!(t.dim(), phi.dim());
    assert_eq!(t.dim(), y.len());
    let mut acc = QuadResult::zero();
    for atom in t.atoms() {
        acc.accumulate(&mt_atom(atom, phi, y, cfg)?);
    }
    Ok(acc)
}

/// `∫ t(x) σ(x) x^{-(e+𝟙)} dx` over the support of `base`, truncating
/// unbounded cells through the decay certificate.
fn negative_power_integral(
    base: &DensityAtom,
    exponents: &MultiIndex,
    eps: f64,
    cfg: &PairingConfig,
) -> Result<QuadResult> {
    let cells = base.support.cells();
    let bounded: Vec<Cell> = if cells.iter().all(|c| c.is_bounded()) {
        cells
    } else {
        let decay = base.decay.ok_or(Error::MissingDecayBound)?;
        let min_e = *exponents.components().iter().min().unwrap() as i32;
        let q = decay.exponent + min_e + 1;
        if q < 2 {
            return Err(Error::InsufficientDecay {
                needed: 2 - min_e - 1,
                declared: decay.exponent,
            });
        }
        let eps_eff = eps.min(1.0);
        let bound =
            decay.bound * eps_eff.powi(-(exponents.order() as i32 + exponents.dim() as i32));
        let radius = match cfg.truncation_radius {
            Some(r) => r,
            None => tail_radius(q as f64, bound, cfg.abs_tol)?,
        };
        cells.iter().map(|c| truncate_cell(c, radius)).collect()
    };
    let f = |x: &[f64]| {
        let s = match sigma(x) {
            Ok(v) => v,
            Err(_) => return Scalar::new(0.0, 0.0),
        };
        base.eval(x) * s * exponents.negative_power(x)
    };
    integrate_cells(&f, &bounded, cfg)
}

/// The eigenvalue `m_α = T(σ(x)/x^{α+𝟙})`, atom by atom in closed or
/// quadrature form.  Requires the kernel certificate.
pub fn eigenvalue(
    t: &Distribution,
    alpha: &MultiIndex,
    cfg: &PairingConfig,
) -> Result<QuadResult> {
    let cert = certify(t)?;
    let mut acc = QuadResult::zero();
    for atom in t.atoms() {
        let r = match atom {
            Atom::Point {
                location,
                beta,
                coeff,
            } => {
                // ⟨δ_a^{(β)}, σ x^{-(α+𝟙)}⟩ = (α+β)!/α! · σ(a)/a^{α+β+𝟙}
                let s = sigma(location)?;
                let mut v = coeff * s * factorial_ratio_f64(alpha, beta);
                for (j, &aj) in location.iter().enumerate() {
                    v *= aj.powi(-((alpha.get(j) + beta.get(j)) as i32) - 1);
                }
                QuadResult {
                    value: v,
                    error_bound: 0.0,
                    subdivisions: 0,
                }
            }
            Atom::Density(base) => negative_power_integral(base, alpha, cert.eps, cfg)?,
            Atom::Deriv { beta, coeff, base } => {
                // both sign flips cancel: m_α(∂^β t) = (α+β)!/α! ∫ t σ x^{-(α+β+𝟙)}
                let mut r =
                    negative_power_integral(base, &alpha.add(beta), cert.eps, cfg)?;
                let factor = coeff * factorial_ratio_f64(alpha, beta);
                r.value *= factor;
                r.error_bound *= factor.norm();
                Ok::<_, Error>(r)?
            }
            Atom::Euler { beta, coeff, base } => {
                // (θ*)^β has eigenvalue α^β on σ/x^{α+𝟙}
                let mut apow = 1.0;
                for (j, &b) in beta.components().iter().enumerate() {
                    apow *= (alpha.get(j) as f64).powi(b as i32);
                }
                let mut r = negative_power_integral(base, alpha, cert.eps, cfg)?;
                let factor = coeff * apow;
                r.value *= factor;
                r.error_bound *= factor.norm();
                r
            }
        };
        acc.accumulate(&r);
    }
    Ok(acc)
}

/// Weak-form residual of the eigenvalue equation:
/// `|∫ ξ^α (Mφ)(ξ) dξ − m_α ∫ η^α φ(η) dη|`.
pub fn verify_eigen(
    t: &Distribution,
    alpha: &MultiIndex,
    phi: &TestFunction,
    cfg: &PairingConfig,
) -> Result<f64> {
    let cert = certify(t)?;
    let m = eigenvalue(t, alpha, cfg)?;
    let phi_cell = phi.support_cell();
    let dim = phi.dim();
    // (Mφ)(ξ) vanishes once |ξ_j| > r_j/ε
    let mut lo = Vec::with_capacity(dim);
    let mut hi = Vec::with_capacity(dim);
    for j in 0..dim {
        let r = phi_cell.lo[j].abs().max(phi_cell.hi[j].abs());
        lo.push(-r / cert.eps);
        hi.push(r / cert.eps);
    }
    let inner_cfg = cfg.tightened(0.01);
    let captured: RefCell<Option<Error>> = RefCell::new(None);
    let f = |xi: &[f64]| match apply_multiplicative(t, phi, xi, &inner_cfg) {
        Ok(r) => alpha.monomial(xi) * r.value,
        Err(e) => {
            captured.borrow_mut().get_or_insert(e);
            Scalar::new(0.0, 0.0)
        }
    };
    let lhs = integrate_cells(&f, &[Cell::new(lo, hi)], cfg)?;
    if let Some(e) = captured.into_inner() {
        return Err(e);
    }
    let moment = integrate_cells(
        &|eta: &[f64]| Scalar::new(alpha.monomial(eta) * phi.eval(eta), 0.0),
        &[phi_cell],
        cfg,
    )?;
    Ok((lhs.value - m.value * moment.value).norm())
}

/// Central-difference derivative `∂^β g(y)` with two Richardson steps per
/// order; used when a star-convolution factor needs derivatives of the inner
/// function.
fn fd_derivative(
    g: &dyn Fn(&[f64]) -> Result<Scalar>,
    beta: &MultiIndex,
    y: &[f64],
) -> Result<Scalar> {
    let Some(axis) = beta.components().iter().position(|&b| b > 0) else {
        return g(y);
    };
    let mut e = vec![0u32; beta.dim()];
    e[axis] = 1;
    let reduced = beta
        .checked_sub(&MultiIndex::new(e))
        .expect("axis has positive order");
    let h0 = 5e-3 * (1.0 + y[axis].abs());
    let diff = |h: f64| -> Result<Scalar> {
        let mut yp = y.to_vec();
        let mut ym = y.to_vec();
        yp[axis] += h;
        ym[axis] -= h;
        Ok((fd_derivative(g, &reduced, &yp)? - fd_derivative(g, &reduced, &ym)?) / (2.0 * h))
    };
    let d1 = diff(h0)?;
    let d2 = diff(h0 / 2.0)?;
    let d3 = diff(h0 / 4.0)?;
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d3 - d2) / 3.0;
    Ok((16.0 * r2 - r1) / 15.0)
}

/// `⟨S⋆T, φ⟩ = S_y(T_x φ(x∘y))`.  `T` must pass the certificate gate.
pub fn star_pair(
    s: &Distribution,
    t: &Distribution,
    phi: &TestFunction,
    cfg: &PairingConfig,
) -> Result<QuadResult> {
    let cert = certify(t)?;
    let inner_cfg = cfg.tightened(0.01);
    let inner =
        |y: &[f64]| -> Result<Scalar> { Ok(apply_multiplicative(t, phi, y, &inner_cfg)?.value) };
    // the inner function vanishes outside this box
    let phi_cell = phi.support_cell();
    let dim = phi.dim();
    let inner_box = {
        let mut lo = Vec::with_capacity(dim);
        let mut hi = Vec::with_capacity(dim);
        for j in 0..dim {
            let r = phi_cell.lo[j].abs().max(phi_cell.hi[j].abs());
            lo.push(-r / cert.eps);
            hi.push(r / cert.eps);
        }
        Cell::new(lo, hi)
    };
    let mut acc = QuadResult::zero();
    for atom in s.atoms() {
        match atom {
            Atom::Point {
                location,
                beta,
                coeff,
            } => {
                let sign = if beta.order() % 2 == 0 { 1.0 } else { -1.0 };
                let v = fd_derivative(&inner, beta, location)?;
                acc.accumulate(&QuadResult {
                    value: coeff * sign * v,
                    error_bound: 0.0,
                    subdivisions: 0,
                });
            }
            Atom::Density(base) => {
                let cells = base.support.clipped_cells(&inner_box);
                let captured: RefCell<Option<Error>> = RefCell::new(None);
                let f = |y: &[f64]| match inner(y) {
                    Ok(v) => base.eval(y) * v,
                    Err(e) => {
                        captured.borrow_mut().get_or_insert(e);
                        Scalar::new(0.0, 0.0)
                    }
                };
                let r = integrate_cells(&f, &cells, cfg)?;
                if let Some(e) = captured.into_inner() {
                    return Err(e);
                }
                acc.accumulate(&r);
            }
            Atom::Deriv { beta, coeff, base } => {
                let sign = if beta.order() % 2 == 0 { 1.0 } else { -1.0 };
                let cells = base.support.clipped_cells(&inner_box);
                let captured: RefCell<Option<Error>> = RefCell::new(None);
                let f = |y: &[f64]| match fd_derivative(&inner, beta, y) {
                    Ok(v) => base.eval(y) * v,
                    Err(e) => {
                        captured.borrow_mut().get_or_insert(e);
                        Scalar::new(0.0, 0.0)
                    }
                };
                let mut r = integrate_cells(&f, &cells, cfg)?;
                if let Some(e) = captured.into_inner() {
                    return Err(e);
                }
                r.value *= coeff * sign;
                r.error_bound *= coeff.norm();
                acc.accumulate(&r);
            }
            Atom::Euler { beta, coeff, base } => {
                let adjoint = EulerOperator::theta_pow(beta).adjoint().to_xd_form();
                let terms = adjoint.terms_f64();
                let cells = base.support.clipped_cells(&inner_box);
                let captured: RefCell<Option<Error>> = RefCell::new(None);
                let f = |y: &[f64]| {
                    let mut a = Scalar::new(0.0, 0.0);
                    for (delta, c) in &terms {
                        match fd_derivative(&inner, delta, y) {
                            Ok(v) => a += *c * delta.monomial(y) * v,
                            Err(e) => {
                                captured.borrow_mut().get_or_insert(e);
                            }
                        }
                    }
                    base.eval(y) * a
                };
                let mut r = integrate_cells(&f, &cells, cfg)?;
                if let Some(e) = captured.into_inner() {
                    return Err(e);
                }
                r.value *= coeff;
                r.error_bound *= coeff.norm();
                acc.accumulate(&r);
            }
        }
    }
    Ok(acc)
}

/// The reflected kernel `ξ ↦ t(1/ξ) σ(ξ)/(ξ_1⋯ξ_d)`.
pub fn sharp_transform(t: &DensityAtom) -> Result<DensityAtom> {
    let eps = t.support.hyperplane_distance();
    if eps <= 0.0 {
        return Err(Error::SupportTouchesHyperplane);
    }
    let support = t.support.invert_cover()?;
    let inner = t.field.clone();
    let field: Field = Arc::new(move |xi: &[f64]| {
        if xi.contains(&0.0) {
            return Scalar::new(0.0, 0.0);
        }
        let inv: Vec<f64> = xi.iter().map(|v| 1.0 / v).collect();
        let s = sigma(xi).expect("zero coordinates excluded above");
        let jac: f64 = xi.iter().product();
        inner(&inv) * (s / jac)
    });
    Ok(DensityAtom {
        field,
        support,
        decay: None,
    })
}

/// Residual of the factorization of `L_T` through the reflected kernel:
/// `|⟨L_T f, φ⟩ − ⟨P(θ)(M_{T^#} f), φ⟩|` for `T = P(θ) t`.
pub fn factorization_check(
    p: &EulerOperator,
    t: &DensityAtom,
    f: &TestFunction,
    phi: &TestFunction,
    cfg: &PairingConfig,
) -> Result<f64> {
    let dim = t.dim();
    let kernel = Distribution::new(
        dim,
        p.coeffs()
            .iter()
            .map(|(gamma, c)| Atom::Euler {
                beta: gamma.clone(),
                coeff: Scalar::new(
                    num_traits::ToPrimitive::to_f64(c).expect("coefficient fits in f64"),
                    0.0,
                ),
                base: t.clone(),
            })
            .collect(),
    );
    let inner_cfg = cfg.tightened(0.01);
    // left side: ∫ f(y) (M_kernel φ)(y) dy
    let captured: RefCell<Option<Error>> = RefCell::new(None);
    let lhs_f = |y: &[f64]| match apply_multiplicative(&kernel, phi, y, &inner_cfg) {
        Ok(r) => f.eval(y) * r.value,
        Err(e) => {
            captured.borrow_mut().get_or_insert(e);
            Scalar::new(0.0, 0.0)
        }
    };
    let lhs = integrate_cells(&lhs_f, &[f.support_cell()], cfg)?;
    if let Some(e) = captured.into_inner() {
        return Err(e);
    }
    // right side: ⟨M_{T#} f, P*(θ) φ⟩
    let reflected = Distribution::from_atom(Atom::Density(sharp_transform(t)?));
    let adjoint = p.adjoint().to_xd_form();
    let captured: RefCell<Option<Error>> = RefCell::new(None);
    let rhs_f = |y: &[f64]| match apply_multiplicative(&reflected, f, y, &inner_cfg) {
        Ok(r) => r.value * adjoint.apply(phi, y),
        Err(e) => {
            captured.borrow_mut().get_or_insert(e);
            Scalar::new(0.0, 0.0)
        }
    };
    let rhs = integrate_cells(&rhs_f, &[phi.support_cell()], cfg)?;
    if let Some(e) = captured.into_inner() {
        return Err(e);
    }
    Ok((lhs.value - rhs.value).norm())
}

/// One row of the extendability report: is `|x|^{-γ} t(x)` integrable?
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendabilityRow {
    pub gamma: MultiIndex,
    pub pass: bool,
    /// The integral `∫ |t(x)| |x|^{-γ} dx` when it exists.
    pub value: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExtendabilityReport {
    pub rows: Vec<ExtendabilityRow>,
    pub all_pass: bool,
    /// The reflected-and-shifted kernel built when every row passes.
    pub shifted_kernel: Option<DensityAtom>,
}

/// For each `γ ≤ γ_max`, test integrability of `|x|^{-γ} t_β` near the
/// hyperplanes by adaptive quadrature with singularity detection.
pub fn extendability_check(
    t: &Distribution,
    gamma_max: &MultiIndex,
    cfg: &PairingConfig,
) -> Result<ExtendabilityReport> {
    let mut rows = Vec::new();
    let mut all_pass = true;
    for gamma in MultiIndex::iter_below(gamma_max) {
        let mut total = 0.0f64;
        let mut pass = true;
        for atom in t.atoms() {
            let base = match atom {
                Atom::Density(b) => b,
                Atom::Deriv { base, .. } => base,
                _ => return Err(Error::NotADerivAtom),
            };
            let cells = base.support.cells();
            if cells.iter().any(|c| !c.is_bounded()) {
                return Err(Error::MissingDecayBound);
            }
            let g = gamma.clone();
            let f = |x: &[f64]| {
                let mut w = base.eval(x).norm();
                for (j, &xj) in x.iter().enumerate() {
                    w *= xj.abs().powi(-(g.get(j) as i32));
                }
                Scalar::new(w, 0.0)
            };
            match integrate_cells(&f, &cells, cfg) {
                Ok(r) => total += r.value.re,
                Err(Error::NonIntegrableSingularity { .. })
                | Err(Error::BudgetExhausted { .. }) => pass = false,
                Err(e) => return Err(e),
            }
        }
        all_pass &= pass;
        rows.push(ExtendabilityRow {
            gamma,
            pass,
            value: pass.then_some(total),
        });
    }
    let shifted_kernel = if all_pass {
        build_shifted_kernel(t)
    } else {
        None
    };
    Ok(ExtendabilityReport {
        rows,
        all_pass,
        shifted_kernel,
    })
}

/// `S(ξ) = σ(ξ)/(ξ_1⋯ξ_d) · ξ^β · t(1/ξ)` summed over derivative atoms; the
/// support cover maps interval endpoints through `u ↦ 1/u` with `0 ↦ ∞`.
fn build_shifted_kernel(t: &Distribution) -> Option<DensityAtom> {
    let dim = t.dim();
    let mut parts: Vec<(MultiIndex, Scalar, Field)> = Vec::new();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for atom in t.atoms() {
        let (beta, coeff, base) = match atom {
            Atom::Density(b) => (MultiIndex::zeros(dim), Scalar::new(1.0, 0.0), b),
            Atom::Deriv { beta, coeff, base } => (beta.clone(), *coeff, base),
            _ => return None,
        };
        for c in base.support.cells() {
            let inverted = invert_cell_cover(&c);
            for j in 0..dim {
                lo[j] = lo[j].min(inverted.lo[j]);
                hi[j] = hi[j].max(inverted.hi[j]);
            }
        }
        parts.push((beta, coeff, base.field.clone()));
    }
    let field: Field = Arc::new(move |xi: &[f64]| {
        if xi.contains(&0.0) {
            return Scalar::new(0.0, 0.0);
        }
        let inv: Vec<f64> = xi.iter().map(|v| 1.0 / v).collect();
        let s = sigma(xi).expect("zero coordinates excluded above");
        let jac: f64 = xi.iter().product();
        let mut total = Scalar::new(0.0, 0.0);
        for (beta, coeff, f) in &parts {
            total += coeff * beta.monomial(xi) * f(&inv);
        }
        total * (s / jac)
    });
    Some(DensityAtom {
        field,
        support: Region::Cell(Cell::new(lo, hi)),
        decay: None,
    })
}

/// Cover of `{1/u : u ∈ [lo, hi]}` on each axis; `0` maps to the appropriate
/// infinity, intervals containing `0` in the interior cover everything.
fn invert_cell_cover(cell: &Cell) -> Cell {
    let mut lo = Vec::with_capacity(cell.dim());
    let mut hi = Vec::with_capacity(cell.dim());
    for (&l, &h) in cell.lo.iter().zip(&cell.hi) {
        if l < 0.0 && h > 0.0 {
            lo.push(f64::NEG_INFINITY);
            hi.push(f64::INFINITY);
        } else {
            let a = if h == 0.0 { f64::NEG_INFINITY } else { 1.0 / h };
            let b = if l == 0.0 { f64::INFINITY } else { 1.0 / l };
            lo.push(a.min(b));
            hi.push(a.max(b));
        }
    }
    Cell::new(lo, hi)
}

/// An eigenvalue table `α ↦ m_α` for all `α ≤ α_max` componentwise.
#[derive(Debug, Clone)]
pub struct EigenvalueTable {
    entries: Vec<(MultiIndex, Scalar, f64)>,
}

impl EigenvalueTable {
    pub fn compute(
        t: &Distribution,
        alpha_max: &MultiIndex,
        cfg: &PairingConfig,
    ) -> Result<EigenvalueTable> {
        let mut entries = Vec::new();
        for alpha in MultiIndex::iter_below(alpha_max) {
            let r = eigenvalue(t, &alpha, cfg)?;
            entries.push((alpha, r.value, r.error_bound));
        }
        Ok(EigenvalueTable { entries })
    }

    pub fn entries(&self) -> &[(MultiIndex, Scalar, f64)] {
        &self.entries
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<(Scalar, f64)> {
        self.entries
            .iter()
            .find(|(a, _, _)| a == alpha)
            .map(|(_, v, e)| (*v, *e))
    }
}

/// A certified kernel bundled with its gate evidence.
#[derive(Debug, Clone)]
pub struct HadamardOperator {
    kernel: Distribution,
    certificate: Certificate,
}

impl HadamardOperator {
    /// Runs the certificate gate; uncertifiable kernels are rejected.
    pub fn new(kernel: Distribution) -> Result<Self> {
        let certificate = certify(&kernel)?;
        Ok(HadamardOperator {
            kernel,
            certificate,
        })
    }

    pub fn kernel(&self) -> &Distribution {
        &self.kernel
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    pub fn apply(&self, phi: &TestFunction, y: &[f64], cfg: &PairingConfig) -> Result<QuadResult> {
        apply_multiplicative(&self.kernel, phi, y, cfg)
    }

    pub fn eigenvalue(&self, alpha: &MultiIndex, cfg: &PairingConfig) -> Result<QuadResult> {
        eigenvalue(&self.kernel, alpha, cfg)
    }

    pub fn eigenvalue_table(
        &self,
        alpha_max: &MultiIndex,
        cfg: &PairingConfig,
    ) -> Result<EigenvalueTable> {
        EigenvalueTable::compute(&self.kernel, alpha_max, cfg)
    }

    /// `⟨L(S), φ⟩` for the operator with this kernel.
    pub fn convolve_pair(
        &self,
        s: &Distribution,
        phi: &TestFunction,
        cfg: &PairingConfig,
    ) -> Result<QuadResult> {
        star_pair(s, &self.kernel, phi, cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::BumpTerm;
    use crate::dist::{indicator, Decay};

    fn cfg() -> PairingConfig {
        PairingConfig::default()
    }

    fn bump_at(center: f64, scale: f64) -> TestFunction {
        TestFunction::new(vec![BumpTerm {
            coeff: 1.0,
            gamma: MultiIndex::zeros(1),
            center: vec![center],
            scale: vec![scale],
        }])
    }

    fn indicator_12() -> Distribution {
        Distribution::from_atom(Atom::Density(indicator(vec![1.0], vec![2.0])))
    }

    #[test]
    fn identity_kernel_eigenvalues() {
        let t = Distribution::delta(vec![1.0]);
        for a in 0..=6u32 {
            let r = eigenvalue(&t, &MultiIndex::new(vec![a]), &cfg()).unwrap();
            assert!((r.value.re - 1.0).abs() < 1e-14 && r.value.im == 0.0);
        }
        let t2 = Distribution::delta(vec![1.0, 1.0]);
        let r = eigenvalue(&t2, &MultiIndex::new(vec![3, 2]), &cfg()).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn indicator_eigenvalues_analytic() {
        // ∫_1^2 x^{-(α+1)} dx = ln 2 for α=0, (1-2^{-α})/α otherwise
        let t = indicator_12();
        let m0 = eigenvalue(&t, &MultiIndex::new(vec![0]), &cfg()).unwrap();
        assert!((m0.value.re - core::f64::consts::LN_2).abs() < 1e-10);
        for a in 1..=6u32 {
            let m = eigenvalue(&t, &MultiIndex::new(vec![a]), &cfg()).unwrap();
            let expected = (1.0 - 2f64.powi(-(a as i32))) / a as f64;
            assert!(
                (m.value.re - expected).abs() < 1e-10,
                "alpha={a}: {} vs {expected}",
                m.value.re
            );
        }
    }

    #[test]
    fn point_eigenvalue_example() {
        // δ_2: m_1 = σ(2)/2² = 1/4
        let t = Distribution::delta(vec![2.0]);
        let m = eigenvalue(&t, &MultiIndex::new(vec![1]), &cfg()).unwrap();
        assert!((m.value.re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn scaling_action_examples() {
        // δ_a: (Mφ)(y) = φ(ay)
        let t = Distribution::delta(vec![3.0]);
        let phi = bump_at(0.0, 2.0);
        let r = apply_multiplicative(&t, &phi, &[0.5], &cfg()).unwrap();
        assert!((r.value.re - phi.eval(&[1.5])).abs() < 1e-15);
        // indicator: (Mφ)(y) = (1/y)∫_y^{2y} φ
        let t = indicator_12();
        let y = 0.7;
        let r = apply_multiplicative(&t, &phi, &[y], &cfg()).unwrap();
        let oracle = integrate_cells(
            &|u: &[f64]| Scalar::new(phi.eval(u) / y, 0.0),
            &[Cell::new(vec![y], vec![2.0 * y])],
            &cfg(),
        )
        .unwrap();
        assert!((r.value - oracle.value).norm() < 1e-10);
    }

    #[test]
    fn scaling_action_agrees_with_pairing_off_hyperplane() {
        let t = Distribution::new(
            1,
            vec![
                Atom::Deriv {
                    beta: MultiIndex::new(vec![1]),
                    coeff: Scalar::new(1.0, 0.5),
                    base: indicator(vec![1.0], vec![2.0]),
                },
                Atom::Euler {
                    beta: MultiIndex::new(vec![2]),
                    coeff: Scalar::new(0.3, 0.0),
                    base: indicator(vec![-2.0], vec![-1.0]),
                },
            ],
        );
        let phi = bump_at(0.4, 1.2);
        for y in [0.8, -1.3, 2.0] {
            let a = apply_multiplicative(&t, &phi, &[y], &cfg()).unwrap().value;
            let b = t
                .pair(&phi.scale_argument(&[y]).unwrap(), &cfg())
                .unwrap()
                .value;
            assert!((a - b).norm() < 1e-9, "y={y}: {a} vs {b}");
        }
    }

    #[test]
    fn scaling_action_support_vanishing_is_exact() {
        // T ⊂ W_1, φ ∈ D(B_2) ⇒ (Mφ)(y) = 0 for |y| > 2, with no quadrature
        let t = indicator_12();
        let phi = bump_at(0.0, 2.0);
        for y in [2.1, -5.0, 100.0] {
            let r = apply_multiplicative(&t, &phi, &[y], &cfg()).unwrap();
            assert_eq!(r.value, Scalar::new(0.0, 0.0));
            assert_eq!(r.subdivisions, 0);
        }
    }

    #[test]
    fn scaling_action_composes_with_argument_scaling() {
        // M(φ(η·))(x) = (Mφ)(ηx)
        let t = indicator_12();
        let phi = bump_at(0.5, 1.0);
        let eta = [1.7];
        let scaled = phi.scale_argument(&eta).unwrap();
        for x in [0.3, -0.6, 1.1] {
            let a = apply_multiplicative(&t, &scaled, &[x], &cfg()).unwrap().value;
            let b = apply_multiplicative(&t, &phi, &[eta[0] * x], &cfg())
                .unwrap()
                .value;
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn hyperplane_value_indicator() {
        // (Mφ)(0) = T_x φ(0) = φ(0) ∫_1^2 dx = φ(0)
        let t = indicator_12();
        let phi = bump_at(0.0, 2.0);
        let r = apply_multiplicative(&t, &phi, &[0.0], &cfg()).unwrap();
        assert!((r.value.re - phi.eval(&[0.0])).abs() < 1e-10);
    }

    #[test]
    fn hyperplane_needs_decay() {
        // unbounded support without a declared decay bound is rejected at y=0
        let base = DensityAtom {
            field: Arc::new(|x: &[f64]| Scalar::new((1.0 + x[0] * x[0]).powi(-2), 0.0)),
            support: Region::w_eps(1, 1.0),
            decay: None,
        };
        let t = Distribution::from_atom(Atom::Density(base.clone()));
        let phi = bump_at(0.0, 2.0);
        assert!(matches!(
            apply_multiplicative(&t, &phi, &[0.0], &cfg()),
            Err(Error::HyperplaneWithoutWitness)
        ));
        // with the certificate the same value converges to the truncated tail
        let with_decay = DensityAtom {
            decay: Some(Decay {
                exponent: 4,
                bound: 1.0,
            }),
            ..base
        };
        let t = Distribution::from_atom(Atom::Density(with_decay));
        let r = apply_multiplicative(&t, &phi, &[0.0], &cfg()).unwrap();
        // ∫_{|x|≥1} (1+x²)^{-2} dx · φ(0) = (π/2 - 1 + ... ) exact: π/4 - 1/2 + ... use
        // antiderivative: ∫ (1+x²)^{-2} = x/(2(1+x²)) + atan(x)/2; over |x|≥1: π/2 - (1/4 + π/8)·2
        let one_sided = core::f64::consts::PI / 4.0 - (0.25 + core::f64::consts::PI / 8.0);
        let expected = 2.0 * one_sided * phi.eval(&[0.0]);
        assert!((r.value.re - expected).abs() < 1e-8, "{} vs {expected}", r.value.re);
    }

    #[test]
    fn verify_eigen_examples() {
        let phi = bump_at(0.6, 0.5);
        // δ_2, α=1
        let t = Distribution::delta(vec![2.0]);
        let res = verify_eigen(&t, &MultiIndex::new(vec![1]), &phi, &cfg()).unwrap();
        assert!(res < 1e-8, "residual {res}");
        // indicator, α=0 and 2
        let t = indicator_12();
        for a in [0u32, 2] {
            let res = verify_eigen(&t, &MultiIndex::new(vec![a]), &phi, &cfg()).unwrap();
            assert!(res < 1e-7, "alpha={a} residual {res}");
        }
    }

    #[test]
    fn derivative_kernel_eigenvalue_scaling() {
        // T = -(xτ)' with τ = indicator [1,2] has m_α = -(α+1)·m_α(τ)
        let xtau = DensityAtom {
            field: Arc::new(|x: &[f64]| {
                if (1.0..=2.0).contains(&x[0]) {
                    Scalar::new(x[0], 0.0)
                } else {
                    Scalar::new(0.0, 0.0)
                }
            }),
            support: Region::cell(vec![1.0], vec![2.0]),
            decay: None,
        };
        let t = Distribution::from_atom(Atom::Deriv {
            beta: MultiIndex::new(vec![1]),
            coeff: Scalar::new(-1.0, 0.0),
            base: xtau,
        });
        let tau = indicator_12();
        for a in 0..=4u32 {
            let alpha = MultiIndex::new(vec![a]);
            let lhs = eigenvalue(&t, &alpha, &cfg()).unwrap().value.re;
            let rhs = -((a + 1) as f64) * eigenvalue(&tau, &alpha, &cfg()).unwrap().value.re;
            assert!((lhs - rhs).abs() < 1e-9, "alpha={a}: {lhs} vs {rhs}");
        }
        // and the weak form agrees with the closed form
        let res = verify_eigen(&t, &MultiIndex::new(vec![2]), &bump_at(0.5, 0.4), &cfg()).unwrap();
        assert!(res < 1e-6, "residual {res}");
    }

    #[test]
    fn euler_kernel_eigenvalue_scaling() {
        // m_α(θ^β t) = α^β m_α(t)
        let base = indicator(vec![1.0], vec![2.0]);
        let tau = indicator_12();
        for b in 1..=2u32 {
            let t = Distribution::from_atom(Atom::Euler {
                beta: MultiIndex::new(vec![b]),
                coeff: Scalar::new(1.0, 0.0),
                base: base.clone(),
            });
            for a in 0..=4u32 {
                let alpha = MultiIndex::new(vec![a]);
                let lhs = eigenvalue(&t, &alpha, &cfg()).unwrap().value.re;
                let rhs =
                    (a as f64).powi(b as i32) * eigenvalue(&tau, &alpha, &cfg()).unwrap().value.re;
                assert!((lhs - rhs).abs() < 1e-9, "a={a} b={b}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn star_identity_and_double_sifting() {
        let phi = bump_at(0.8, 0.9);
        // δ_1 ⋆ T recovers T
        let t = indicator_12();
        let s = Distribution::delta(vec![1.0]);
        let star = star_pair(&s, &t, &phi, &cfg()).unwrap().value;
        let direct = t.pair(&phi, &cfg()).unwrap().value;
        assert!((star - direct).norm() < 1e-9);
        // δ_a ⋆ δ_b = δ_{ab}
        let s = Distribution::delta(vec![-0.5]);
        let t = Distribution::delta(vec![3.0]);
        let star = star_pair(&s, &t, &phi, &cfg()).unwrap().value;
        assert!((star.re - phi.eval(&[-1.5])).abs() < 1e-12);
    }

    #[test]
    fn star_density_pair_matches_double_quadrature() {
        let phi = bump_at(2.0, 1.5);
        let s = indicator_12();
        let t = indicator_12();
        let star = star_pair(&s, &t, &phi, &cfg()).unwrap().value;
        let oracle = integrate_cells(
            &|p: &[f64]| Scalar::new(phi.eval(&[p[0] * p[1]]), 0.0),
            &[Cell::new(vec![1.0, 1.0], vec![2.0, 2.0])],
            &cfg(),
        )
        .unwrap()
        .value;
        assert!((star - oracle).norm() < 1e-7, "{star} vs {oracle}");
    }

    #[test]
    fn commutation_with_dilations() {
        // ⟨L_T(D_a S), φ⟩ = ⟨D_a(L_T S), φ⟩; the right side pairs against the
        // transposed dilation of φ
        let t = indicator_12();
        let phi = bump_at(1.0, 0.8);
        for a in [[2.0], [-1.5]] {
            for s in [Distribution::delta(vec![1.3]), indicator_12()] {
                let lhs = star_pair(&s.dilate(&a).unwrap(), &t, &phi, &cfg())
                    .unwrap()
                    .value;
                let transposed = phi
                    .scale_argument(&[1.0 / a[0]])
                    .unwrap()
                    .scaled(sigma(&a).unwrap() / a[0]);
                let rhs = star_pair(&s, &t, &transposed, &cfg()).unwrap().value;
                assert!((lhs - rhs).norm() < 1e-8, "a={a:?}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn sharp_transform_examples() {
        // indicator [1,2] reflects to 1_{[1/2,1]}(ξ)/ξ
        let t = indicator(vec![1.0], vec![2.0]);
        let sharp = sharp_transform(&t).unwrap();
        for (xi, expected) in [(0.6, 1.0 / 0.6), (0.9, 1.0 / 0.9), (0.4, 0.0), (1.1, 0.0)] {
            assert!((sharp.eval(&[xi]).re - expected).abs() < 1e-14, "xi={xi}");
        }
        // pairing matches the change-of-variables oracle ⟨T#, φ⟩ = ∫ t(x) φ(1/x) dx/x
        let phi = bump_at(0.75, 0.2);
        let lhs = Distribution::from_atom(Atom::Density(sharp))
            .pair(&phi, &cfg())
            .unwrap()
            .value;
        let oracle = integrate_cells(
            &|x: &[f64]| Scalar::new(phi.eval(&[1.0 / x[0]]) / x[0], 0.0),
            &[Cell::new(vec![1.0], vec![2.0])],
            &cfg(),
        )
        .unwrap()
        .value;
        assert!((lhs - oracle).norm() < 1e-9);
        // double sharp recovers the original pairing
        let t2 = sharp_transform(&sharp_transform(&t).unwrap()).unwrap();
        let phi = bump_at(1.5, 0.4);
        let a = Distribution::from_atom(Atom::Density(t2))
            .pair(&phi, &cfg())
            .unwrap()
            .value;
        let b = Distribution::from_atom(Atom::Density(t))
            .pair(&phi, &cfg())
            .unwrap()
            .value;
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn factorization_through_reflected_kernel() {
        let t = indicator(vec![1.0], vec![2.0]);
        let f = bump_at(0.5, 0.4);
        let phi = bump_at(0.8, 0.6);
        for p in [
            EulerOperator::one(1),
            EulerOperator::theta(1, 0),
        ] {
            let res = factorization_check(&p, &t, &f, &phi, &cfg()).unwrap();
            assert!(res < 1e-6, "P={p:?}: residual {res}");
        }
    }

    #[test]
    fn extendability_pass_and_fail() {
        // t_p(x) = x^p/p! near 0 fails at γ = p+1, passes below
        for p in 0..=2u32 {
            let fact: f64 = (1..=p).map(|k| k as f64).product::<f64>().max(1.0);
            let base = DensityAtom {
                field: Arc::new(move |x: &[f64]| {
                    if x[0] >= 0.0 {
                        Scalar::new(
                            x[0].powi(p as i32) / fact
                                * crate::dist::cutoff_near_zero(0.5, 1.0, x[0]),
                            0.0,
                        )
                    } else {
                        Scalar::new(0.0, 0.0)
                    }
                }),
                support: Region::cell(vec![0.0], vec![1.0]),
                decay: None,
            };
            let t = Distribution::from_atom(Atom::Density(base));
            let report =
                extendability_check(&t, &MultiIndex::new(vec![p + 1]), &cfg()).unwrap();
            for row in &report.rows {
                let expect_pass = row.gamma.get(0) <= p;
                assert_eq!(row.pass, expect_pass, "p={p} gamma={:?}", row.gamma);
            }
            assert!(!report.all_pass);
        }
        // flat-vanishing density passes every γ
        let flat = DensityAtom {
            field: Arc::new(|x: &[f64]| {
                if x[0] > 0.0 && x[0] <= 1.0 {
                    Scalar::new(crate::dist::flat_exp(x[0]), 0.0)
                } else {
                    Scalar::new(0.0, 0.0)
                }
            }),
            support: Region::cell(vec![0.0], vec![1.0]),
            decay: None,
        };
        let t = Distribution::from_atom(Atom::Density(flat));
        let report = extendability_check(&t, &MultiIndex::new(vec![4]), &cfg()).unwrap();
        assert!(report.all_pass, "{:?}", report.rows);
        assert!(report.shifted_kernel.is_some());
    }

    #[test]
    fn operator_gate() {
        assert!(HadamardOperator::new(indicator_12()).is_ok());
        let at_zero = Distribution::from_atom(Atom::Point {
            location: vec![0.0],
            beta: MultiIndex::new(vec![1]),
            coeff: Scalar::new(1.0, 0.0),
        });
        assert!(matches!(
            HadamardOperator::new(at_zero),
            Err(Error::SupportTouchesHyperplane)
        ));
    }

    #[test]
    fn eigenvalue_table_lookup() {
        let op = HadamardOperator::new(indicator_12()).unwrap();
        let table = op
            .eigenvalue_table(&MultiIndex::new(vec![3]), &cfg())
            .unwrap();
        assert_eq!(table.entries().len(), 4);
        let (m1, _) = table.get(&MultiIndex::new(vec![1])).unwrap();
        assert!((m1.re - 0.5).abs() < 1e-10);
    }

    #[test]
    fn eigenvalue_multiplicativity_via_explicit_star() {
        // δ_a ⋆ T = σ(a)^{-1}(Πa)^{-1} D_{1/a} T, so its eigenvalues must be
        // m_α(δ_a)·m_α(T)
        let t = indicator_12();
        let a = 2.0;
        let star = t.dilate(&[1.0 / a]).unwrap().scaled(Scalar::new(
            1.0 / (sigma(&[a]).unwrap() * a),
            0.0,
        ));
        for al in 0..=3u32 {
            let alpha = MultiIndex::new(vec![al]);
            let lhs = eigenvalue(&star, &alpha, &cfg()).unwrap().value;
            let ma_delta = sigma(&[a]).unwrap() * a.powi(-(al as i32) - 1);
            let rhs = ma_delta * eigenvalue(&t, &alpha, &cfg()).unwrap().value;
            assert!((lhs - rhs).norm() < 1e-9, "alpha={al}: {lhs} vs {rhs}");
        }
    }
}
