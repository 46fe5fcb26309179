//! Spectral enclosures for one-dimensional Dirac operators
//! `H = −i d/dx σ₁ + m σ₃ + V` with non-Hermitian 2×2 matrix potentials.
//!
//! Closed-form regions live in [`enclosures`], [`delta_models`] and
//! [`resonance_regions`]; [`birman_schwinger`] is an independent numerical
//! eigenvalue finder used to cross-check them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod birman_schwinger;
pub mod complexmaps;
pub mod delta_models;
pub mod enclosures;
pub mod error;
pub mod potentials;
pub mod quadrature;
pub mod resonance_regions;
pub mod serde_complex;

pub use error::{Result, SpectralError};
pub use num_complex::Complex64;
