//! Jacobi-matrix coefficients and truncated spectral decompositions for a
//! family of second-order differential and q-difference operators that become
//! tridiagonal in an orthonormal polynomial basis.
//!
//! The library is organised around a pair of orthogonal polynomial families
//! linked by a degree-1 Radon–Nikodym factor `r` (`dμ = r dν`): the operator
//! `T^γ = r·(L + γ)`, with `L` diagonal on the big family, acts
//! tridiagonally on the orthonormal small family. Three concrete cases are
//! implemented:
//!
//! * a Jacobi differential operator on (−1, 1), whose tridiagonal
//!   coefficients match an orthonormal Wilson recurrence,
//! * a bounded q-difference operator on the lattice {qᵏ} (parameter shift in
//!   `a`), matching an Askey–Wilson recurrence, and
//! * an unbounded q-difference operator on the same lattice (shift in `b`),
//!   whose truncated sections stay nonnegative under the birth–death sign
//!   rule.
//!
//! Modules build on each other in order: [`specialfn`] (scalar kernels and
//! the double-double layer), [`families`] (the polynomial families, their
//! measures and inner products), [`operators`] (exact operator application),
//! [`tridiag`] (connection and Jacobi-matrix coefficients), and [`spectral`]
//! (truncated spectra, closed-form spectral predictions, and the q-transform
//! identities).

// Domain guards are written `!(x > 0.0)` on purpose: the negation rejects
// NaN along with the out-of-range sign, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod specialfn;
pub mod families;
pub mod operators;
pub mod tridiag;
pub mod spectral;

pub(crate) mod eigen;

pub use error::{Error, Result};
