//! Simulation of entanglement distribution with hybrid parity gates.
//!
//! Atoms sit in single-sided cavities; a coherent probe reflected off each
//! cavity picks up a phase that depends on the atomic level. Homodyne
//! detection of the probe then projects the atoms onto a parity class.

// `!(x > 0.0)` style checks are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod cli;
pub mod error;
pub mod homodyne;
pub mod hybrid_state;
pub mod metrics;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
