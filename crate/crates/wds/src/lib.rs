//! Combinatorial certification toolkit for word-hyperbolic Dehn surgery.
//!
//! The crate mechanizes the discrete side of angled-spine certificates:
//! alternating diagram analysis, normal-curve combinatorics on sphere
//! patterns, angle structures on ideal triangulations with exact rational
//! arithmetic, and floating-point cusp geometry estimates.

pub mod angle;
pub mod cusp_geom;
pub mod certify;
pub mod cli;
pub mod diagram;
pub mod exact;
pub mod pattern;
pub mod report;
pub mod triangulation;
