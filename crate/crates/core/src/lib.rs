//! Exact and numerical machinery around ternary cyclotomic coefficient
//! growth: polynomial heights, inverse-pair lattice geometry, Kloosterman
//! sums, and the prime searches tying them together.

pub mod beiter;
pub mod bfi;
pub mod cyclotomic;
pub mod error;
pub mod inversegeo;
pub mod numtheory;
pub mod par;
pub mod rat;
pub mod sweeps;

pub use error::{Error, Result};
