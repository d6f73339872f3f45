//! Twisted convolution algebras `ℓ¹_v(Z^n, θ)` realizing higher-dimensional
//! noncommutative tori.

// `!(x > 0.0)` style checks are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cli;
pub mod error;
pub mod extension_group;
pub mod phases;
pub mod sampling;
pub mod spectral;
pub mod structure;
pub mod suites;
pub mod weights;

pub use algebra::Element;
pub use error::{Error, Result};
pub use phases::{IrrationalBasis, LatticePoint, Rational, ThetaData, UnitPhase};
pub use weights::Weight;
