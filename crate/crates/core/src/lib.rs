//! Concentrating idempotent trigonometric polynomials.
//!
//! The crate builds idempotent polynomials (sums of distinct exponentials
//! `e(h x)` with unit coefficients) whose `L^p` mass concentrates on a
//! prescribed symmetric set, computes the associated extremal constants, and
//! produces measured certificates of concentration with spectral gaps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod constructions;
pub mod diophantine;
pub mod error;
pub mod grids;
pub mod pipeline;
pub mod trigpoly;

pub use error::{Error, Result};
