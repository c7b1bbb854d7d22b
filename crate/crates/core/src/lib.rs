//! Computational toolkit for dense generalised Fermat equations
//! `sum_j sum_{n in I_j} c_n x_n^{i_j} = u` over finite fields and `Z/NZ`.
//!
//! The crate is organised bottom-up:
//!
//! - [`group`]: exact arithmetic in `Z/NZ` and `F_{p^m}`.
//! - [`spectral`]: transforms, convolutions and dual norms.
//! - [`charsums`]: complete exponential sums with bound certificates.
//! - [`bohr`]: inhomogeneous Bohr sets, arc partitions, wrappers, CRT slices.
//! - [`wrapping`]: the constructive wrapping pipeline.
//! - [`counting`]: solution counts, popular Cauchy-Davenport checks,
//!   equidistribution of powers, extremal constructions.
//! - [`harness`]: experiment configs, seeded sweeps and reports.

pub mod arith;
pub mod bohr;
pub mod charsums;
pub mod counting;
pub mod error;
pub mod group;
pub mod harness;
pub mod sets;
pub mod spectral;
pub mod wrapping;

pub use error::{Error, Result};
pub use group::{GroupSpec, RoughnessProfile};
pub use spectral::{DenseComplexFunction, Spectrum, WeightedFunction};
