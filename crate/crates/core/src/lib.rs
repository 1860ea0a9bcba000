//! Exact construction and certification toolkit for nodal integral affine
//! base spaces.
//!
//! The pipeline: exact scalars over a real quadratic field ([`exact`]),
//! Delzant polygons with the boundary-distance height function and its
//! level geometry ([`polygon`]), canonical classifying data with the
//! closed-form level-length function and rotation numbers ([`canonical`]),
//! fundamental-domain nodal charts ([`chart`]), piecewise unimodular maps
//! realizing the clockwise level translation ([`maps`]), and per-height
//! recurrence certificates ([`dynamics`]).
//!
//! Everything that decides a verdict is computed in exact arithmetic; the
//! only decimals in the workspace are in rendering output.

// exact scalars are a pair of big rationals; errors and enums that carry
// them are inherently large
#![allow(clippy::result_large_err, clippy::large_enum_variant)]

pub mod canonical;
pub mod chart;
pub mod dynamics;
pub mod exact;
pub mod geom;
pub mod maps;
pub mod polygon;

pub use canonical::{CanonicalType, EndType, HatClass};
pub use chart::{make_s2xs2, NodalChart};
pub use dynamics::{orbit_gaps, scan, verdict, RecurrenceVerdict};
pub use exact::{QuadraticNumber, UnimodularMatrix};
pub use maps::{build_level_translation, translate_along_level, verify_iso, PiecewiseUnimodularMap};
pub use polygon::DelzantPolygon;
