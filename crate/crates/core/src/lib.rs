//! Slender body theory for free-endpoint fibers: geometry, Stokes kernels,
//! slender body velocity/pressure/stress evaluation, residual diagnostics and
//! ε-scaling analysis.

// Range guards are written as !(x > lo && x < hi) so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kernels;
pub mod ode;
pub mod quadrature;
pub mod residuals;
pub mod sbt;

pub use error::{Result, SbtError};
