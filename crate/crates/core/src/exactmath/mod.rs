//! Exact arithmetic substrate: rationals, polynomials, chambers and
//! integration, plus the small amount of dense linear algebra the lattice
//! code needs. No floating point is used anywhere.

mod chamber;
pub mod linalg;
mod poly;
mod rational;

pub use chamber::{integrate_chamber, integrate_interval, Affine2, AffineFn, Chamber, Polygon};
pub use poly::{Poly1, Poly2, Scalar};
pub use rational::Rational;
