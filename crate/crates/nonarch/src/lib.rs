//! Exact computer algebra over truncated discrete valuation rings `k[[π]]`.
//!
//! Layers, bottom up:
//! - [`field`] and [`dvr`]: residue fields and truncated `π`-adic elements.
//! - [`annulus`]: bounded functions on annuli, Newton polygons, Weierstrass
//!   division and preparation.
//! - [`presentation`]: weighted special algebras and Weil restriction.
//! - [`descent`]: Galois coinvariants and the descent pipeline.
//! - [`linearize`]: normal forms of tame automorphisms of annuli.
//! - [`moduli`]: fractional annuli up to isomorphism.

pub mod error;
pub mod field;
pub mod parse;
pub mod dvr;
pub mod annulus;
pub mod poly;
pub mod presentation;
pub mod descent;
pub mod moduli;
pub mod linearize;
pub mod config;
pub mod cli;

pub use error::{Error, Result};
pub use field::{Fe, Field, FieldSpec};
pub use dvr::{DvrElement, ExtensionSpec};
