//! Observational entropy, measured relative entropies and their continuity
//! certificates.

pub mod error;
pub mod qmat;

pub use error::{Error, Result};
pub mod entropy;
pub mod povm;
pub mod bounds;
pub mod distance;
pub mod experiments;
pub mod campaign;
pub mod cli;
