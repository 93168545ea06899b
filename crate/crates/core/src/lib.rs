//! Numerical laboratory for Berezin-number inequalities on finite-dimensional
//! reproducing kernel Hilbert spaces.

pub mod berezin;
pub mod blocks;
pub mod error;
pub mod harness;
pub mod hilbert;
pub mod inequalities;
pub mod matcore;

pub use error::{Error, Result};
