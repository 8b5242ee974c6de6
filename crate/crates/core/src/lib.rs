//! Geometric phases of photons guided along a noncoplanarly curved fibre.
//!
//! The crate works in a truncated multimode Fock space with ħ = c = 1. It
//! provides the photon spin algebra as explicit matrices ([`fock`]), the
//! tangent geometry of fibre paths ([`geometry`]), closed-form and
//! Schrödinger-evolution routes to the geometric phase ([`phase`]), and the
//! circular-birefringence dispersion of a gyroelectric medium ([`media`]).
//!
//! Everything here is `no_std` + `alloc`; file formats and the scenario
//! runner live in the `gphase` companion crate.
#![no_std]
// `!(x <= tol)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod calculus;
mod error;
pub mod fock;
pub mod geometry;
pub mod linalg;
pub mod media;
pub mod phase;
pub mod vec3;

pub use error::{Error, Result};
pub use num_complex::Complex64;
