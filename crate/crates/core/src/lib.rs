//! Switching-based feedback stabilization of continuously monitored quantum
//! systems: Lindblad generators, Lyapunov certificates, dwell-time bounds,
//! positivity-preserving stochastic master equation integration and the
//! five switching laws.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod error;
pub mod expm;
pub mod harness;
pub mod lindblad;
pub mod operator;
pub mod sampling;
pub mod sme;
pub mod switching;

pub use error::{Error, Result};
