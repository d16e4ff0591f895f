//! Construction and verification of aperiodic Doppler-resilient complementary
//! sequence sets (DRCSSs).
//!
//! Five families are built from the trace m-sequence of a primitive element
//! of `GF(q^2)`, optionally spread through a column-orthogonal matrix of
//! `p`-th roots of unity. The [`ambiguity`] module measures their aperiodic
//! ambiguity functions by exhaustive scan and compares the result against the
//! known lower bounds, and [`orthomatrix`] measures the multicarrier PAPR of
//! their column sequences.

pub mod ambiguity;
pub mod constructions;
mod error;
pub mod finite_field;
pub mod orthomatrix;
pub mod toolkit;

pub use error::{Error, Result};
