//! Correlation conversion over zero-capacity channels.
//!
//! A classically correlated tripartite input is pushed through a phase-flip
//! channel on `B` and an entanglement-breaking measure-and-prepare channel on
//! the flag `C`. The crate builds every object in that pipeline, evaluates the
//! correlation measures of the output, simulates flag post-selection, and
//! checks the closed-form claims against eigendecomposition-based oracles.

pub mod channels;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod protocol;
pub mod qudit;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, EigenSpectrum, C64};
