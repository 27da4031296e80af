//! Countably-Markov piecewise-monotone maps on graphs.
//!
//! A map is described by a [`graph::MarkovMapSpec`]; its 0/1 transition
//! matrix is accessed through rules ([`transition::CountableMatrix`]), so
//! countable partitions are never materialized. Entropy estimates and
//! piecewise-affine conjugate models are built on top of it.
//!
//! Numeric code is generic over [`scalar::Scalar`]; the aliases below fix
//! the common choices.

// `!(x > 0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod horseshoe;
pub mod scalar;
pub mod slope;
pub mod symbolic;
pub mod transition;

pub use error::{Error, Result};
pub use scalar::{Quadratic, Scalar};

pub use num_rational::BigRational;

/// Vector with exact rational entries.
pub type ExactVector = slope::SubEigenvector<BigRational>;
/// Vector with entries in a real quadratic field, for irrational Perron roots.
pub type SurdVector = slope::SubEigenvector<Quadratic>;
pub type FloatVector = slope::SubEigenvector<f64>;

pub type ExactModel = slope::ConstantSlopeModel<BigRational>;
pub type SurdModel = slope::ConstantSlopeModel<Quadratic>;
pub type FloatModel = slope::ConstantSlopeModel<f64>;

pub type ExactPoint = symbolic::PointCoord<BigRational>;
pub type FloatPoint = symbolic::PointCoord<f64>;
