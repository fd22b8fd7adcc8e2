//! Finite stellar-rank single-mode states as entire wavefunctions.
//!
//! A state of stellar rank `r` has a position wavefunction of the form
//! `P(z) exp(g2 z^2 + g1 z + g0)` with `P` a degree-`r` polynomial. This crate
//! builds that form, tracks the `r` complex zeros under quadratic Hamiltonians
//! (numerically and through the exact Calogero-Moser matrix solution), and
//! checks everything against a truncated Fock-basis evolution.

// `!(x >= y)` is used on purpose so that NaN fails every range check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod dynamics;
pub mod entire;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod phase;
pub mod poly;
pub mod quadrature;
pub mod state;
pub mod wavefunction;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};

/// The imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);
