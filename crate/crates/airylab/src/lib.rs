//! Pseudo-spectral laboratory for the quartic generalized KdV equation
//! u_t + u_xxx + (u^4)_x = 0 on a periodic stand-in for the real line.
//!
//! The crate provides the operator toolkit (Fourier multipliers, the Airy
//! propagator), the mixed space-time norm functionals, an independent
//! integrating-factor RK4 oracle, the Duhamel fixed-point solver with
//! contraction diagnostics, weighted-space commutator machinery, and a
//! registry of executable inequality checks with empirical constants.

pub mod error;
pub mod evolution;
pub mod grid;
pub mod norms;
pub mod picard;
pub mod spectral;
pub mod weighted;

pub use error::{AiryError, Result};
