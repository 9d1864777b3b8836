//! QCrank data encoding compiled for dynamically programmable neutral-atom
//! arrays, with Pauli noise simulation and reconstruction analysis.

pub mod analysis;
pub mod circuit;
pub mod compiler;
pub mod error;
pub mod harness;
pub mod noise;
pub mod sim;

pub use error::{Error, Result};
