//! Exact computations with representations of bound quivers: Euler forms,
//! cocycle and coboundary spaces, Ext dimensions, regularity certificates for
//! irreducible components of representation varieties, and a five-parameter
//! family of bound quivers together with its verification harness.

pub mod cli;
pub mod error;
pub mod family;
pub mod format;
pub mod geometry;
pub mod homological;
pub mod linalg;
pub mod quiver;
pub mod rep;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use quiver::{Arrow, BoundQuiver, DimVector, Path, Quiver, Relation};
pub use rep::{CocycleElement, Representation};
pub use scalar::Scalar;

/// Arbitrary-precision rationals; the default field.
pub type Rational = num_rational::BigRational;
/// Rationals with 64-bit numerator and denominator. Overflow panics.
pub type SmallRational = num_rational::Rational64;

pub type QMatrix = linalg::Matrix<Rational>;
pub type QRepresentation = Representation<Rational>;
pub type QBoundQuiver = BoundQuiver<Rational>;
pub type QRelation = Relation<Rational>;
pub type QFamily = family::Family<Rational>;
