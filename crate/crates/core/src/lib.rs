//! Two-qubit gates from spin-independent contact scattering of two particles
//! in one dimension.
//!
//! - [`spin`]: two-qubit states, gates and concurrence
//! - [`smatrix`]: the continuum gate for a delta interaction
//! - [`wavepacket`]: concurrence for Gaussian momentum packets
//! - [`lattice`]: two-particle Bose-Hubbard chains and end-to-end transfer
//! - [`atomphys`]: physical-unit design for cold atoms

// `!(x > 0.0)` is how NaN gets rejected alongside the range check
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod atomphys;
pub mod error;
pub mod lattice;
mod quad;
pub mod smatrix;
pub mod spin;
pub mod wavepacket;

pub use error::{Error, Result};
pub use quad::{integrate, integrate_real, QuadResult};
