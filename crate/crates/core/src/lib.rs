//! Inflationary substitution tilings read as positional number systems.
//!
//! A tiling whose tile types satisfy `ρ R_i = ⋃_j (δ_ij + u_ij(R_j))` is also
//! a digit system with radix `ρ` and digit set `{δ_ij}`. This crate builds
//! such rule systems (a catalog plus parametric silver-number families),
//! expands them to finite depth, checks measure and disjointness laws,
//! analyzes partition matrices and the associated number fields, and writes
//! deterministic SVG.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod numberfield;
pub mod render;
pub mod rules;

pub use error::{Error, Result};
