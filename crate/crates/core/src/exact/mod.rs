//! Exact arithmetic over a real quadratic field, integer-lattice linear
//! algebra, and continued-fraction machinery. Everything downstream builds
//! on these scalars.

mod contfrac;
mod lattice;
mod quad;

pub use contfrac::{continued_fraction, min_return_distance, ContinuedFraction};
pub use lattice::{monodromy, primitive_decompose, LatticeVector, PlanePoint, UnimodularMatrix};
pub use quad::{floor_scaled, is_valid_radicand, ExactError, QuadraticNumber};
