//! Squeezing witnesses for two-mode bosonic states that stay valid whatever
//! the local oscillator is.

pub mod channels;
pub mod cli;
pub mod dsl;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod validate;
pub mod witness;
