//! Numerical verification of the unitary "quantization commutes with
//! reduction" map for the adjoint action of `SU(n)` on its cotangent bundle.
//!
//! The crate is organized bottom-up:
//!
//! * [`roots`]: root data, Weyl groups and dominance.
//! * [`laurent`]: sparse Laurent class functions on the complexified torus,
//!   Weyl numerators, the Weyl denominator and characters.
//! * [`measures`]: the Gaussian heat measure on the complexified torus and
//!   three independent ways of integrating against it.
//! * [`reduction`]: the matrix-group side (momentum map, zero set,
//!   regularity, contraction determinant, orientation signs).
//! * [`qcr`]: invariant and reduced states and the map between them.

pub mod error;
pub mod hermite;
pub mod laurent;
pub mod measures;
pub mod qcr;
pub mod reduction;
pub mod roots;

pub use error::{Error, Result};
pub use num_complex::Complex64;
