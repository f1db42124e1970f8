//! JSON problem descriptions: named distributions and test functions plus
//! numeric configuration, schema-validated before any computation runs.

use crate::kernels;
use hadamard_core::dist::indicator;
use hadamard_core::{
    Atom, BumpTerm, Decay, DensityAtom, Distribution, MultiIndex, PairingConfig, Region, Scalar,
    TestFunction,
};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A schema violation or inconsistency in a spec file; always maps to the
/// input-rejected exit code.
#[derive(Debug)]
pub struct SpecError(pub String);

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "spec file rejected: {}", self.0)
    }
}

impl std::error::Error for SpecError {}

fn err<T>(msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError(msg.into()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub version: u32,
    pub dimension: usize,
    #[serde(default)]
    pub distributions: BTreeMap<String, DistSpec>,
    #[serde(default)]
    pub test_functions: BTreeMap<String, Vec<TermSpec>>,
    #[serde(default)]
    pub config: ConfigSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSpec {
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub builtin: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AtomSpec {
    Point {
        location: Vec<f64>,
        #[serde(default)]
        beta: Option<Vec<u32>>,
        #[serde(default)]
        coeff: Option<[f64; 2]>,
    },
    Density(DensitySpec),
    Deriv {
        beta: Vec<u32>,
        #[serde(default)]
        coeff: Option<[f64; 2]>,
        density: DensitySpec,
    },
    Euler {
        beta: Vec<u32>,
        #[serde(default)]
        coeff: Option<[f64; 2]>,
        density: DensitySpec,
    },
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    /// Indicator of a cell; `null` endpoints mean the axis is unbounded on
    /// that side.
    Indicator {
        lo: Vec<Option<f64>>,
        hi: Vec<Option<f64>>,
        #[serde(default)]
        decay: Option<DecaySpec>,
    },
    /// `x^e` on a bounded cell (integer exponents, possibly negative).
    Power {
        exponents: Vec<i32>,
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySpec {
    pub exponent: i32,
    pub bound: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: f64,
    pub gamma: Vec<u32>,
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub max_subdivisions: Option<u32>,
    #[serde(default)]
    pub truncation_radius: Option<f64>,
}

impl ConfigSpec {
    pub fn apply(&self, cfg: &mut PairingConfig) {
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.max_subdivisions {
            cfg.max_subdivisions = v;
        }
        if let Some(v) = self.truncation_radius {
            cfg.truncation_radius = Some(v);
        }
    }
}

impl SpecFile {
    /// Parse and schema-validate a spec file.
    pub fn parse(text: &str) -> Result<SpecFile, SpecError> {
        let spec: SpecFile =
            serde_json::from_str(text).map_err(|e| SpecError(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), SpecError> {
        if self.version != 1 {
            return err(format!("unsupported version {}", self.version));
        }
        if self.dimension == 0 {
            return err("dimension must be at least 1");
        }
        for (name, d) in &self.distributions {
            match (&d.builtin, d.atoms.is_empty()) {
                (Some(_), false) => {
                    return err(format!(
                        "distribution '{name}': give either atoms or a builtin, not both"
                    ))
                }
                (None, true) => {
                    return err(format!("distribution '{name}': no atoms and no builtin"))
                }
                _ => {}
            }
            if let Some(b) = &d.builtin {
                if !matches!(b.as_str(), "oscillatory_exponential" | "half_line_indicator") {
                    return err(format!("distribution '{name}': unknown builtin '{b}'"));
                }
                if self.dimension != 1 {
                    return err(format!("distribution '{name}': builtins are 1-dimensional"));
                }
            }
            for atom in &d.atoms {
                atom.validate(name, self.dimension)?;
            }
        }
        for (name, terms) in &self.test_functions {
            if terms.is_empty() {
                return err(format!("test function '{name}': needs at least one term"));
            }
            for term in terms {
                if term.gamma.len() != self.dimension
                    || term.center.len() != self.dimension
                    || term.scale.len() != self.dimension
                {
                    return err(format!(
                        "test function '{name}': gamma/center/scale must have length {}",
                        self.dimension
                    ));
                }
                if term.scale.iter().any(|&s| !s.is_finite() || s <= 0.0) {
                    return err(format!("test function '{name}': scales must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Build the named distribution.
    pub fn distribution(&self, name: &str) -> Result<Distribution, SpecError> {
        let spec = self
            .distributions
            .get(name)
            .ok_or_else(|| SpecError(format!("unknown distribution '{name}'")))?;
        if let Some(b) = &spec.builtin {
            return Ok(match b.as_str() {
                "oscillatory_exponential" => kernels::oscillatory_kernel(),
                "half_line_indicator" => kernels::half_line_kernel(),
                other => return err(format!("unknown builtin '{other}'")),
            });
        }
        let atoms = spec
            .atoms
            .iter()
            .map(|a| a.build(self.dimension))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Distribution::new(self.dimension, atoms))
    }

    /// Build the named test function.
    pub fn test_function(&self, name: &str) -> Result<TestFunction, SpecError> {
        let terms = self
            .test_functions
            .get(name)
            .ok_or_else(|| SpecError(format!("unknown test function '{name}'")))?;
        Ok(TestFunction::new(
            terms
                .iter()
                .map(|t| BumpTerm {
                    coeff: t.coeff,
                    gamma: MultiIndex::new(t.gamma.clone()),
                    center: t.center.clone(),
                    scale: t.scale.clone(),
                })
                .collect(),
        ))
    }
}

impl AtomSpec {
    fn validate(&self, dist: &str, dim: usize) -> Result<(), SpecError> {
        let check_len = |what: &str, len: usize| -> Result<(), SpecError> {
            if len != dim {
                err(format!("distribution '{dist}': {what} must have length {dim}"))
            } else {
                Ok(())
            }
        };
        match self {
            AtomSpec::Point { location, beta, .. } => {
                check_len("location", location.len())?;
                if let Some(b) = beta {
                    check_len("beta", b.len())?;
                }
            }
            AtomSpec::Density(d) => d.validate(dist, dim)?,
            AtomSpec::Deriv { beta, density, .. } | AtomSpec::Euler { beta, density, .. } => {
                check_len("beta", beta.len())?;
                density.validate(dist, dim)?;
            }
        }
        Ok(())
    }

    fn build(&self, dim: usize) -> Result<Atom, SpecError> {
        let coeff_of = |c: &Option<[f64; 2]>| {
            c.map(|[re, im]| Scalar::new(re, im))
                .unwrap_or(Scalar::new(1.0, 0.0))
        };
        Ok(match self {
            AtomSpec::Point {
                location,
                beta,
                coeff,
            } => Atom::Point {
                location: location.clone(),
                beta: beta
                    .clone()
                    .map(MultiIndex::new)
                    .unwrap_or_else(|| MultiIndex::zeros(dim)),
                coeff: coeff_of(coeff),
            },
            AtomSpec::Density(d) => Atom::Density(d.build()?),
            AtomSpec::Deriv {
                beta,
                coeff,
                density,
            } => Atom::Deriv {
                beta: MultiIndex::new(beta.clone()),
                coeff: coeff_of(coeff),
                base: density.build()?,
            },
            AtomSpec::Euler {
                beta,
                coeff,
                density,
            } => Atom::Euler {
                beta: MultiIndex::new(beta.clone()),
                coeff: coeff_of(coeff),
                base: density.build()?,
            },
        })
    }
}

impl DensitySpec {
    fn validate(&self, dist: &str, dim: usize) -> Result<(), SpecError> {
        match self {
            DensitySpec::Indicator { lo, hi, .. } => {
                if lo.len() != dim || hi.len() != dim {
                    return err(format!(
                        "distribution '{dist}': indicator lo/hi must have length {dim}"
                    ));
                }
            }
            DensitySpec::Power { exponents, lo, hi } => {
                if exponents.len() != dim || lo.len() != dim || hi.len() != dim {
                    return err(format!(
                        "distribution '{dist}': power exponents/lo/hi must have length {dim}"
                    ));
                }
                if lo
                    .iter()
                    .zip(hi)
                    .any(|(a, b)| !a.is_finite() || !b.is_finite() || a >= b)
                {
                    return err(format!(
                        "distribution '{dist}': power densities need bounded cells with lo < hi"
                    ));
                }
            }
        }
        Ok(())
    }

    fn build(&self) -> Result<DensityAtom, SpecError> {
        match self {
            DensitySpec::Indicator { lo, hi, decay } => {
                let lo: Vec<f64> = lo.iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)).collect();
                let hi: Vec<f64> = hi.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect();
                let mut atom = indicator(lo, hi);
                atom.decay = decay.map(|d| Decay {
                    exponent: d.exponent,
                    bound: d.bound,
                });
                Ok(atom)
            }
            DensitySpec::Power { exponents, lo, hi } => {
                let e = exponents.clone();
                let (clo, chi) = (lo.clone(), hi.clone());
                let cell = hadamard_core::Cell::new(clo, chi);
                let inner = cell.clone();
                let field = Arc::new(move |x: &[f64]| {
                    if !inner.contains(x) {
                        return Scalar::new(0.0, 0.0);
                    }
                    let mut v = 1.0;
                    for (xj, &ej) in x.iter().zip(&e) {
                        v *= xj.powi(ej);
                    }
                    Scalar::new(v, 0.0)
                });
                Ok(DensityAtom::new(field, Region::Cell(cell), None))
            }
        }
    }
}
