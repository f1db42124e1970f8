//! Operator calculus of Hadamard-type operators on distributions.
//!
//! A Hadamard operator is a continuous linear operator on distributions that
//! admits every monomial `x^α` as an eigenvector.  Such operators are exactly
//! the multiplicative convolutions `L_T(S) = S ⋆ T` with a kernel `T` whose
//! support keeps positive distance to the coordinate hyperplanes and which
//! decays at infinity in the Euler-derivative sense.  The eigenvalue attached
//! to `x^α` is the pairing `m_α = T(σ(x)/x^{α+𝟙})` where `σ` is the product
//! of coordinate signs.
//!
//! This crate provides the pieces needed to compute with such operators at
//! desk scale (`d ∈ {1, 2}`):
//!
//! * [`MultiIndex`] arithmetic and exact factorial ratios,
//! * [`Region`] geometry (boxes, quadrant boxes and the sets `W_ε`),
//! * a deterministic adaptive Gauss-Kronrod [`quad`]rature engine,
//! * compactly supported smooth test functions with exact derivatives of
//!   every order ([`bump`]),
//! * exact symbolic algebra of Euler operators `P(θ)`, `θ_j = x_j ∂_j`
//!   ([`euler`]),
//! * distributions as finite sums of typed atoms, pairing and dilation
//!   ([`dist`]),
//! * the operators `M_T`, `L_T`, eigenvalue computation, the sharp transform
//!   and extendability checks ([`hadamard`]).
//!
//! The crate is `no_std` compatible (with `alloc`); all IO, file formats and
//! the CLI live in the companion crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bump;
pub mod dist;
pub mod error;
pub mod euler;
pub mod hadamard;
pub mod multi_index;
pub mod quad;
pub mod region;

pub use bump::{BumpTerm, TestFunction};
pub use dist::{Atom, DensityAtom, Decay, Distribution};
pub use error::Error;
pub use euler::{EulerOperator, XdForm};
pub use hadamard::{Certificate, EigenvalueTable};
pub use multi_index::MultiIndex;
pub use quad::{PairingConfig, QuadResult};
pub use region::{sigma, Cell, Region};

/// Scalar type of every numeric pairing; real results come back with a
/// negligible imaginary part.
pub type Scalar = num_complex::Complex<f64>;

/// Convenience result alias.
pub type Result<T> = core::result::Result<T, Error>;
