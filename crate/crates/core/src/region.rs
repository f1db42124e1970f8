//! Geometric regions: boxes `B_r`, the sets `W_ε` and the sign function `σ`.

use crate::error::Error;
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// The product of coordinate signs `σ(x) = Π_j x_j/|x_j|`, constant on each
/// open quadrant.  Rejects points with a zero coordinate.
pub fn sigma(x: &[f64]) -> Result<f64> {
    let mut s = 1.0;
    for &xj in x {
        if xj == 0.0 {
            return Err(Error::ZeroCoordinate);
        }
        if xj < 0.0 {
            s = -s;
        }
    }
    Ok(s)
}

/// An axis-aligned cell `[lo_1, hi_1] × … × [lo_d, hi_d]`; endpoints may be
/// infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Cell {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b));
        Cell { lo, hi }
    }

    /// The whole space as a single unbounded cell.
    pub fn all(dim: usize) -> Self {
        Cell {
            lo: vec![f64::NEG_INFINITY; dim],
            hi: vec![f64::INFINITY; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&xj, (&lo, &hi))| lo <= xj && xj <= hi)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.iter().all(|v| v.is_finite()) && self.hi.iter().all(|v| v.is_finite())
    }

    pub fn is_empty_interior(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| a >= b)
    }

    pub fn intersect(&self, other: &Cell) -> Option<Cell> {
        assert_eq!(self.dim(), other.dim());
        let lo: Vec<f64> = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(&a, &b)| a.max(b))
            .collect();
        let hi: Vec<f64> = self
            .hi
            .iter()
            .zip(&other.hi)
            .map(|(&a, &b)| a.min(b))
            .collect();
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            None
        } else {
            Some(Cell { lo, hi })
        }
    }

    /// Expand by `eps` on every side (used when mollifying).
    pub fn grow(&self, eps: f64) -> Cell {
        Cell {
            lo: self.lo.iter().map(|v| v - eps).collect(),
            hi: self.hi.iter().map(|v| v + eps).collect(),
        }
    }

    /// Smallest distance from the cell to the union of coordinate
    /// hyperplanes; `0.0` when some axis interval contains `0`.
    pub fn hyperplane_distance(&self) -> f64 {
        let mut dist = f64::INFINITY;
        for (&lo, &hi) in self.lo.iter().zip(&self.hi) {
            let axis = if lo <= 0.0 && 0.0 <= hi {
                0.0
            } else {
                lo.abs().min(hi.abs())
            };
            dist = dist.min(axis);
        }
        dist
    }
}

/// Regions over which densities live and integrals run.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// `B_r = {x : |x_j| ≤ r_j for all j}`.
    Box { r: Vec<f64> },
    /// `W_ε = {x : min_j |x_j| ≥ ε}`, unbounded.
    WEps { dim: usize, eps: f64 },
    /// A box restricted to a closed quadrant: `sign_j · x_j ∈ [0, r_j]`.
    QuadrantBox { signs: Vec<i8>, r: Vec<f64> },
    /// A general axis-aligned cell.
    Cell(Cell),
    /// The whole space.
    All { dim: usize },
}

impl Region {
    pub fn sym_box(r: Vec<f64>) -> Region {
        Region::Box { r }
    }

    pub fn w_eps(dim: usize, eps: f64) -> Region {
        assert!(eps > 0.0);
        Region::WEps { dim, eps }
    }

    pub fn cell(lo: Vec<f64>, hi: Vec<f64>) -> Region {
        Region::Cell(Cell::new(lo, hi))
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Box { r } => r.len(),
            Region::WEps { dim, .. } => *dim,
            Region::QuadrantBox { signs, .. } => signs.len(),
            Region::Cell(c) => c.dim(),
            Region::All { dim } => *dim,
        }
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[f64]) -> bool {
        assert_eq!(x.len(), self.dim());
        match self {
            Region::Box { r } => x.iter().zip(r).all(|(&xj, &rj)| xj.abs() <= rj),
            Region::WEps { eps, .. } => x.iter().all(|&xj| xj.abs() >= *eps),
            Region::QuadrantBox { signs, r } => x
                .iter()
                .zip(signs.iter().zip(r))
                .all(|(&xj, (&s, &rj))| {
                    let v = f64::from(s) * xj;
                    (0.0..=rj).contains(&v)
                }),
            Region::Cell(c) => c.contains(x),
            Region::All { .. } => true,
        }
    }

    /// Decompose into cells (cells may have infinite endpoints for `W_ε` and
    /// `All`).
    pub fn cells(&self) -> Vec<Cell> {
        match self {
            Region::Box { r } => vec![Cell::new(
                r.iter().map(|v| -v).collect(),
                r.clone(),
            )],
            Region::WEps { dim, eps } => {
                // per axis: (-inf, -eps] u [eps, inf) -> 2^d cells
                let mut cells = vec![Cell {
                    lo: Vec::new(),
                    hi: Vec::new(),
                }];
                for _ in 0..*dim {
                    let mut next = Vec::with_capacity(cells.len() * 2);
                    for c in &cells {
                        let mut neg = c.clone();
                        neg.lo.push(f64::NEG_INFINITY);
                        neg.hi.push(-eps);
                        let mut pos = c.clone();
                        pos.lo.push(*eps);
                        pos.hi.push(f64::INFINITY);
                        next.push(neg);
                        next.push(pos);
                    }
                    cells = next;
                }
                cells
            }
            Region::QuadrantBox { signs, r } => {
                let mut lo = Vec::with_capacity(signs.len());
                let mut hi = Vec::with_capacity(signs.len());
                for (&s, &rj) in signs.iter().zip(r) {
                    if s >= 0 {
                        lo.push(0.0);
                        hi.push(rj);
                    } else {
                        lo.push(-rj);
                        hi.push(0.0);
                    }
                }
                vec![Cell::new(lo, hi)]
            }
            Region::Cell(c) => vec![c.clone()],
            Region::All { dim } => vec![Cell::all(*dim)],
        }
    }

    /// Cells of the region clipped to `clip`; empty intersections dropped.
    pub fn clipped_cells(&self, clip: &Cell) -> Vec<Cell> {
        self.cells()
            .iter()
            .filter_map(|c| c.intersect(clip))
            .filter(|c| !c.is_empty_interior())
            .collect()
    }

    /// Distance to the coordinate hyperplanes (the largest `ε` with the
    /// region inside `W_ε`); `0.0` when the region touches a hyperplane.
    pub fn hyperplane_distance(&self) -> f64 {
        match self {
            Region::WEps { eps, .. } => *eps,
            Region::All { .. } | Region::Box { .. } | Region::QuadrantBox { .. } => 0.0,
            Region::Cell(c) => c.hyperplane_distance(),
        }
    }

    /// A region covering `{x : a∘x ∈ self}` (the support of a dilated
    /// density).  A cover is enough: the density itself vanishes outside the
    /// true support.
    pub fn dilate_cover(&self, a: &[f64]) -> Result<Region> {
        assert_eq!(a.len(), self.dim());
        if a.contains(&0.0) {
            return Err(Error::ZeroCoordinate);
        }
        Ok(match self {
            Region::Box { r } => Region::Box {
                r: r.iter().zip(a).map(|(&rj, &aj)| rj / aj.abs()).collect(),
            },
            Region::WEps { dim, eps } => {
                let amax = a.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
                Region::WEps {
                    dim: *dim,
                    eps: eps / amax,
                }
            }
            Region::QuadrantBox { signs, r } => Region::QuadrantBox {
                signs: signs
                    .iter()
                    .zip(a)
                    .map(|(&s, &aj)| if aj < 0.0 { -s } else { s })
                    .collect(),
                r: r.iter().zip(a).map(|(&rj, &aj)| rj / aj.abs()).collect(),
            },
            Region::Cell(c) => {
                let mut lo = Vec::with_capacity(c.dim());
                let mut hi = Vec::with_capacity(c.dim());
                for ((&l, &h), &aj) in c.lo.iter().zip(&c.hi).zip(a) {
                    let (p, q) = (l / aj, h / aj);
                    lo.push(p.min(q));
                    hi.push(p.max(q));
                }
                Region::Cell(Cell::new(lo, hi))
            }
            Region::All { dim } => Region::All { dim: *dim },
        })
    }

    /// Expand by `eps` per axis (support growth under mollification).
    pub fn grow(&self, eps: f64) -> Region {
        match self {
            Region::WEps { dim, eps: e } => {
                if e - eps > 0.0 {
                    Region::WEps {
                        dim: *dim,
                        eps: e - eps,
                    }
                } else {
                    Region::All { dim: *dim }
                }
            }
            Region::All { dim } => Region::All { dim: *dim },
            other => {
                let cells = other.cells();
                // Box/QuadrantBox/Cell are single cells
                Region::Cell(cells[0].grow(eps))
            }
        }
    }

    /// A region covering `{ξ : 1/ξ ∈ self}` — the support of the sharp
    /// transform.  Defined only for regions with positive hyperplane
    /// distance.
    pub fn invert_cover(&self) -> Result<Region> {
        let eps = self.hyperplane_distance();
        if eps <= 0.0 {
            return Err(Error::SupportTouchesHyperplane);
        }
        Ok(match self {
            Region::WEps { dim, eps } => Region::Box {
                r: vec![1.0 / eps; *dim],
            },
            Region::Cell(c) => {
                let mut lo = Vec::with_capacity(c.dim());
                let mut hi = Vec::with_capacity(c.dim());
                for (&l, &h) in c.lo.iter().zip(&c.hi) {
                    let (p, q) = (1.0 / h, 1.0 / l);
                    lo.push(p.min(q));
                    hi.push(p.max(q));
                }
                Region::Cell(Cell::new(lo, hi))
            }
            _ => unreachable!("regions touching hyperplanes were rejected above"),
        })
    }
}
