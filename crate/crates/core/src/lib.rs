//! Exact symbolic engine for geometrically deformed homotopy Lie structures
//! on a vector bundle over a coordinate chart.
//!
//! From polynomial connection, anchor and torsion data the crate solves the
//! Fedosov-type recursion for all components of the extended differential,
//! certifies the Lie algebroid axioms through nilpotency, and computes Atiyah
//! and Atiyah-Chern classes, their transgression, the induced Weil-algebra
//! differential and the modular class — all in exact rational arithmetic.

pub mod algebroid;
pub mod atiyah;
pub mod chart;
pub mod derivation;
pub mod element;
pub mod fedosov;
pub mod generator;
pub mod geometry;
pub mod parse;
pub mod poly;
pub mod scalar;

pub use chart::Chart;
pub use derivation::{delta, delta_inv, Derivation, Parity};
pub use element::Element;
pub use fedosov::{check_nilpotency, solve_family, FamilyState, RecursionState, Sector};
pub use generator::Gen;
pub use geometry::{Gauge, GeometrySpec, Tens};
pub use parse::{parse_poly, parse_spec, print_spec, ParseError};
pub use poly::BasePoly;
pub use scalar::Scalar;
