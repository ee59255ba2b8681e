//! Dilation-set invariants for spherical maximal operators.
//!
//! The crate computes entropy numbers `N(E^k, 2^{k-n})` of dyadic blocks of a
//! dilation set, the critical exponent they determine, the endpoint conditions
//! built from them, equally spaced decompositions of convex sequences, and a set
//! of numerical probes of the maximal operators themselves: radial spherical
//! means, multiplier decay, small-ball weak-type ratios and two planar
//! counterexample constructions.
//!
//! ```
//! use maximal_lab::dilation_set::{standard_set, StandardSet};
//! use maximal_lab::entropy::{critical_exponent, profile};
//!
//! let e = standard_set(StandardSet::Power { alpha: 1.0 }).unwrap();
//! let prof = profile(&e, 2, 16, (0, 0)).unwrap();
//! let est = critical_exponent(&prof);
//! assert!((est.p_estimate - 1.5).abs() < 0.03);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditions;
pub mod counterexamples;
pub mod dilation_set;
pub mod entropy;
pub mod error;
pub mod pipeline;
pub mod regularity;
pub mod rng;
pub mod spherical;
mod stats;

pub use error::{Error, Result};
