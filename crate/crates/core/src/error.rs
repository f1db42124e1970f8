use crate::Scalar;
use core::fmt;

/// Error type shared by the whole crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point with a zero coordinate was passed where all coordinates must
    /// be nonzero (the sign function, dilations, argument scaling).
    ZeroCoordinate,
    /// Operands live in different dimensions.
    DimensionMismatch { expected: usize, got: usize },
    /// The subdivision budget ran out before the tolerance was met.  The best
    /// estimate and its error bound are preserved.
    BudgetExhausted { estimate: Scalar, error_bound: f64 },
    /// Adaptive refinement collapsed onto a point without the local error
    /// going down; the integrand is treated as non-integrable there.
    NonIntegrableSingularity { location: f64 },
    /// An unbounded integration region was requested without a decay bound or
    /// truncation radius that would make the tail controllable.
    MissingDecayBound,
    /// A declared decay exponent is too small for the requested computation.
    InsufficientDecay { needed: i32, declared: i32 },
    /// An atom support touches a coordinate hyperplane, so the distribution
    /// cannot be certified.
    SupportTouchesHyperplane,
    /// A hyperplane evaluation was requested for a kernel without a usable
    /// Euler-form witness at that point.
    HyperplaneWithoutWitness,
    /// Derivative atoms only: conversion to Euler form needs support inside
    /// some `W_ε`.
    NotADerivAtom,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroCoordinate => write!(f, "point has a zero coordinate"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::BudgetExhausted {
                estimate,
                error_bound,
            } => write!(
                f,
                "quadrature budget exhausted: best estimate {estimate} ± {error_bound:.3e}"
            ),
            Error::NonIntegrableSingularity { location } => {
                write!(f, "non-integrable singularity detected near {location}")
            }
            Error::MissingDecayBound => {
                write!(f, "unbounded region requires a decay bound or truncation radius")
            }
            Error::InsufficientDecay { needed, declared } => write!(
                f,
                "insufficient decay: need exponent >= {needed}, declared {declared}"
            ),
            Error::SupportTouchesHyperplane => {
                write!(f, "support_in_W_eps failed: an atom touches a coordinate hyperplane")
            }
            Error::HyperplaneWithoutWitness => {
                write!(f, "hyperplane evaluation requested without an Euler-form witness")
            }
            Error::NotADerivAtom => {
                write!(f, "operation only defined for derivative atoms")
            }
        }
    }
}

impl core::error::Error for Error {}
