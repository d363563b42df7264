//! Classifier Hamiltonians: local spin Hamiltonians whose ground space is
//! trained to contain YES-labelled bitstrings and avoid NO-labelled ones.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor`]: dense state vectors, local gates, expectations and marginals.
//! - [`model`]: interaction graphs, interaction sets, datasets and training layouts.
//! - [`anneal`]: Trotterized annealing under a three-family schedule.
//! - [`train`]: one-shot, serial, exact-LP and projected training schemes.
//! - [`oracle`]: exact diagonalization used to cross-check everything else.
//! - [`eval`]: per-datum evaluation, benchmark metrics and plot series.
//! - [`color`]: the embedded red/blue color classification task.
//!
//! Qubit 0 is always the leftmost character of a bitstring literal.

pub mod anneal;
pub mod color;
mod error;
pub mod eval;
pub mod model;
pub mod oracle;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
