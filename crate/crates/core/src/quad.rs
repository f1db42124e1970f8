//! Deterministic adaptive Gauss-Kronrod quadrature, tensorized for `d = 2`.
//!
//! A 7/15 nested rule supplies per-interval error estimates; the interval
//! with the worst estimate is bisected until the global bound meets the
//! tolerance or the subdivision budget runs out.  The refinement order is a
//! total order, so results are bit-for-bit reproducible.

use crate::error::Error;
use crate::region::{Cell, Region};
use crate::{Result, Scalar};
use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Tolerances and budgets governing every numeric evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: u32,
    /// Explicit truncation radius for unbounded regions; when absent the
    /// radius is derived from the integrand's declared decay bound.
    pub truncation_radius: Option<f64>,
    /// Per-axis sample counts for function-valued outputs.
    pub grid: Vec<usize>,
}

impl Default for PairingConfig {
    fn default() -> Self {
        PairingConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 1 << 16,
            truncation_radius: None,
            grid: Vec::new(),
        }
    }
}

impl PairingConfig {
    /// A copy with tolerances scaled by `factor` (used for inner integrals of
    /// nested evaluations).
    pub fn tightened(&self, factor: f64) -> PairingConfig {
        PairingConfig {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..self.clone()
        }
    }
}

/// Value, error bound and work of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Scalar,
    pub error_bound: f64,
    pub subdivisions: u32,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult {
            value: Scalar::new(0.0, 0.0),
            error_bound: 0.0,
            subdivisions: 0,
        }
    }

    pub fn accumulate(&mut self, other: &QuadResult) {
        self.value += other.value;
        self.error_bound += other.error_bound;
        self.subdivisions += other.subdivisions;
    }
}

// 15-point Kronrod nodes (positive half) with the 7-point Gauss rule nested
// at the odd indices.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 7/15 panel on `[a, b]`.
fn gk15(
    f: &mut dyn FnMut(f64) -> Result<Scalar>,
    a: f64,
    b: f64,
) -> Result<(Scalar, f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut fv = [Scalar::new(0.0, 0.0); 15];
    for (i, &x) in XGK.iter().enumerate().take(7) {
        fv[i] = f(mid - half * x)?;
        fv[14 - i] = f(mid + half * x)?;
    }
    fv[7] = f(mid)?;

    let mut kronrod = Scalar::new(0.0, 0.0);
    let mut res_abs = 0.0;
    for i in 0..8 {
        let pair = if i < 7 { fv[i] + fv[14 - i] } else { fv[7] };
        kronrod += WGK[i] * pair;
        res_abs += WGK[i]
            * if i < 7 {
                fv[i].norm() + fv[14 - i].norm()
            } else {
                fv[7].norm()
            };
    }
    let mut gauss = Scalar::new(0.0, 0.0);
    for i in 0..4 {
        let j = 2 * i + 1;
        gauss += WG[i]
            * if j < 7 {
                fv[j] + fv[14 - j]
            } else {
                fv[7]
            };
    }

    let value = half * kronrod;
    let mean = kronrod * 0.5;
    let mut res_asc = 0.0;
    for i in 0..8 {
        let w = WGK[i];
        if i < 7 {
            res_asc += w * ((fv[i] - mean).norm() + (fv[14 - i] - mean).norm());
        } else {
            res_asc += w * (fv[7] - mean).norm();
        }
    }
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();

    let mut err = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    // rounding floor: no estimate below 50 ulps of the absolute-value
    // integral is meaningful, and bisection cannot push past it
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    if !value.is_finite() {
        return Err(Error::NonIntegrableSingularity { location: mid });
    }
    Ok((value, err, floor))
}

struct Segment {
    a: f64,
    b: f64,
    value: Scalar,
    err: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.a == other.a
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // worst error first; ties broken by position so the refinement order
        // is a total order
        self.err
            .total_cmp(&other.err)
            .then(other.a.total_cmp(&self.a))
    }
}

/// Adaptive 1-d integration of `f` over `[a, b]`.
pub fn adaptive_1d(
    f: &mut dyn FnMut(f64) -> Result<Scalar>,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: u32,
) -> Result<(Scalar, f64, u32)> {
    if a >= b {
        return Ok((Scalar::new(0.0, 0.0), 0.0, 0));
    }
    let (v, e, fl) = gk15(f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v,
        err: e,
        floor: fl,
    });
    let mut total_v = v;
    let mut total_e = e;
    let mut total_floor = fl;
    let mut panels: u32 = 1;
    let width_floor = 1e-14 * (b - a).abs().max(a.abs()).max(b.abs()).max(1.0);

    loop {
        let tol = abs_tol.max(rel_tol * total_v.norm());
        if total_e <= tol {
            return Ok((total_v, total_e, panels));
        }
        // the summed rounding floor is invariant under bisection; once the
        // error bound is dominated by it, refining further cannot help, so
        // return the estimate with its honest (roundoff-limited) bound
        if total_e <= 2.0 * total_floor {
            return Ok((total_v, total_e, panels));
        }
        if panels >= max_subdivisions {
            return Err(Error::BudgetExhausted {
                estimate: total_v,
                error_bound: total_e,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if worst.b - worst.a < width_floor {
            return Err(Error::NonIntegrableSingularity { location: mid });
        }
        let (vl, el, fl_l) = gk15(f, worst.a, mid)?;
        let (vr, er, fl_r) = gk15(f, mid, worst.b)?;
        total_v += vl + vr - worst.value;
        total_e += el + er - worst.err;
        total_floor += fl_l + fl_r - worst.floor;
        panels += 1;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: vl,
            err: el,
            floor: fl_l,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: vr,
            err: er,
            floor: fl_r,
        });
    }
}

/// Integrate `f` over a bounded cell, nesting one adaptive pass per axis.
pub fn integrate_cell(
    f: &dyn Fn(&[f64]) -> Scalar,
    cell: &Cell,
    cfg: &PairingConfig,
) -> Result<QuadResult> {
    if !cell.is_bounded() {
        return Err(Error::MissingDecayBound);
    }
    let dim = cell.dim();
    let mut point = alloc::vec![0.0; dim];
    let (value, error_bound, subdivisions) =
        integrate_axes(f, cell, 0, &mut point, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)?;
    Ok(QuadResult {
        value,
        error_bound,
        subdivisions,
    })
}

fn integrate_axes(
    f: &dyn Fn(&[f64]) -> Scalar,
    cell: &Cell,
    axis: usize,
    point: &mut Vec<f64>,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: u32,
) -> Result<(Scalar, f64, u32)> {
    let dim = cell.dim();
    let last = axis + 1 == dim;
    let mut inner_err = 0.0f64;
    let mut inner_panels: u32 = 0;
    let span = cell.hi[axis] - cell.lo[axis];
    let result = {
        let mut g = |t: f64| -> Result<Scalar> {
            point[axis] = t;
            if last {
                Ok(f(point))
            } else {
                let (v, e, n) = integrate_axes(
                    f,
                    cell,
                    axis + 1,
                    point,
                    abs_tol * 0.05,
                    rel_tol * 0.1,
                    max_subdivisions,
                )?;
                inner_err = inner_err.max(e);
                inner_panels = inner_panels.max(n);
                Ok(v)
            }
        };
        adaptive_1d(&mut g, cell.lo[axis], cell.hi[axis], abs_tol, rel_tol, max_subdivisions)?
    };
    let (v, e, n) = result;
    Ok((v, e + inner_err * span, n + inner_panels))
}

/// Sum of integrals over a list of cells; the error bounds add up.
pub fn integrate_cells(
    f: &dyn Fn(&[f64]) -> Scalar,
    cells: &[Cell],
    cfg: &PairingConfig,
) -> Result<QuadResult> {
    let mut acc = QuadResult::zero();
    for cell in cells {
        let r = integrate_cell(f, cell, cfg)?;
        acc.accumulate(&r);
    }
    Ok(acc)
}

/// Integrate over a region.  Unbounded regions need `cfg.truncation_radius`;
/// callers with a declared decay bound should derive one from
/// [`tail_radius`] first.
pub fn integrate(
    f: &dyn Fn(&[f64]) -> Scalar,
    region: &Region,
    cfg: &PairingConfig,
) -> Result<QuadResult> {
    let cells = region.cells();
    let bounded: Vec<Cell> = if cells.iter().all(|c| c.is_bounded()) {
        cells
    } else {
        let radius = cfg.truncation_radius.ok_or(Error::MissingDecayBound)?;
        cells.iter().map(|c| truncate_cell(c, radius)).collect()
    };
    integrate_cells(f, &bounded, cfg)
}

/// Replace infinite endpoints by `±radius`.
pub fn truncate_cell(cell: &Cell, radius: f64) -> Cell {
    Cell {
        lo: cell.lo.iter().map(|&v| v.max(-radius)).collect(),
        hi: cell.hi.iter().map(|&v| v.min(radius)).collect(),
    }
}

/// Radius making the 1-d tail bound `M ∫_R^∞ r^{-q} dr = M R^{1-q}/(q-1)`
/// drop below `tol`.  Needs `q > 1`.
pub fn tail_radius(q: f64, bound: f64, tol: f64) -> Result<f64> {
    if q <= 1.0 || !bound.is_finite() {
        return Err(Error::MissingDecayBound);
    }
    let r = (bound / (tol * (q - 1.0))).powf(1.0 / (q - 1.0));
    Ok(r.max(16.0))
}
