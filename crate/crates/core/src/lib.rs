//! Zero-bias enhanced Stein (zbest) couplings over finite state spaces.
//!
//! The crate is `no_std` and needs only `alloc`. It provides:
//!
//! - [`FiniteDistribution`], [`SegmentMixture`] and [`ZbestTripleLaw`]: exact
//!   (rational) or floating-point laws, measure reweighting and the
//!   interpolation that turns a zbest triple into a zero-bias law.
//! - [`normal`], [`stein`] and [`distance`]: the standard normal CDF, the
//!   Stein solution for half-line indicators, Kolmogorov/Wasserstein
//!   distances to the normal and the generic bound formulas.
//! - [`lightbulb`]: the lightbulb process, its size-bias coupling, the
//!   dagger coupling realised on the original space, and exhaustive
//!   enumeration at small `n`.
//! - [`bernoulli`]: independent Bernoulli sums end to end.
//!
//! Every law type is generic over [`Scalar`], implemented for `f64` and for
//! [`Rational`]. Identities that hold exactly are checked with residual zero
//! in rational mode; floating-point tolerances apply to `f64` only.

#![no_std]
// `!(a > b)` guards must also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision, clippy::assertions_on_constants))]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bernoulli;
pub mod coupling;
pub mod distance;
mod distribution;
mod error;
pub mod lightbulb;
mod mixture;
pub mod normal;
mod scalar;
pub mod stein;

pub use coupling::{TripleAtom, ZbestTripleLaw};
pub use distance::DistanceReport;
pub use distribution::FiniteDistribution;
pub use error::{Error, Result};
pub use mixture::{Segment, SegmentMixture};
pub use scalar::{rational_from_decimal, Rational, Scalar};
