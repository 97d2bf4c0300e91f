//! Exact arithmetic for counting rational points of bounded height with
//! multiplicity conditions on the boundary of the Heisenberg
//! compactification and two companion models.
//!
//! The crate computes three independent views of the same counting problem
//! and lets them confront each other:
//!
//! * direct enumeration of the points themselves ([`counting`]),
//! * local densities at each prime, both from closed-form rational
//!   functions and from a brute-force p-adic volume oracle ([`densities`]),
//! * the predicted growth exponents and leading constant ([`orbifold`],
//!   [`densities::LeadingConstant`]).
//!
//! All arithmetic that feeds a pass/fail decision is exact (big rationals);
//! floating point appears only in final-mile numerics such as Euler product
//! evaluation, archimedean quadrature, and least-squares fits.

pub mod arith;
pub mod counting;
pub mod densities;
mod error;
pub mod heights;
pub mod heisenberg;
pub mod orbifold;
mod poly;
pub mod report;

pub use arith::{PrimitivePoint, Rational};
pub use counting::CountReport;
pub use densities::{DensityReport, LeadingConstant, LocalFactor};
pub use error::{Error, Result};
pub use heisenberg::GroupElement;
pub use orbifold::{
    BoundaryDivisor, ModelKind, Multiplicity, OrbifoldModel, PlaceSet, PredictedInvariants,
};
