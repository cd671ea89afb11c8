//! Feedback capacity regions of degraded broadcast channels.
//!
//! The crate evaluates the Gaussian vector and discrete memoryless capacity
//! regions, computes directed information exactly on finite trajectory laws,
//! and builds upper concave envelopes of `I(X;Y) − λ I(X;Z)` on the input
//! simplex. The `fbregion` binary drives the same code paths from the
//! command line.

pub mod cli;
pub mod directed;
pub mod dm;
pub mod envelope;
pub mod error;
pub mod gaussian;
pub mod gvbc;
pub mod pareto;
pub mod prob;
pub mod report;
pub mod sampling;
pub mod suites;

pub use error::{Error, Result};
