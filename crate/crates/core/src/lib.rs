//! Sard-optimal quadrature formulas for `∫ₐᵇ e^{2πiωx} φ(x) dx` in the Sobolev
//! space `L₂^(m)[a,b]`, and a filtered back-projection pipeline that uses them
//! for the Fourier transform and its filtered inverse.
//!
//! Frequencies are always in cycles per unit length (the kernel is
//! `e^{2πiωx}`), never radians.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command-line
//! front end and random noise live in the `oqf-cli` crate.

#![no_std]

extern crate alloc;

pub mod ct;
pub mod dd;
pub mod discrete_op;
pub mod efpoly;
mod error;
pub mod fourier;
pub mod integrate;
pub mod linalg;
mod math;
pub mod oracle;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Highest smoothness order the coefficient engine accepts.
pub const MAX_ORDER: usize = 6;
