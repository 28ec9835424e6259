//! Random stabilizer-code error exponents on Pauli-mixture channels, with
//! exhaustive desk-scale verification of the supporting counting bounds.

pub mod cli;
pub mod codes;
pub mod error;
pub mod exponent;
pub mod numeric;
pub mod pauli;
pub mod symplectic;
pub mod types;

pub use error::{Error, Result};
