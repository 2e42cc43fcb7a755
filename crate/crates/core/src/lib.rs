//! Numerical and exact tools for the Fubini–Study geometry of CP^N and the
//! variation of Perelman's shrinker entropy along conformal eigen-directions.
//!
//! Numeric code is generic over [`Real`] (`f32`, `f64`); exact code works on
//! arbitrary-precision rationals. The aliases at the bottom fix the scalar
//! types used by the command-line front end.

pub mod algebra;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod moments;
pub mod polynomial;
pub mod quadrature;
pub mod sampling;
pub mod scalar;
pub mod spectral;
pub mod variation;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

/// Chart point in double precision.
pub type Point = geometry::ChartPoint<f64>;
/// Geometry jet in double precision.
pub type Geometry = geometry::GeometryJet<f64>;
