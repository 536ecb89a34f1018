//! Exact computation of loop-space and homotopy decompositions for highly
//! connected manifolds, connected sums of sphere products and two-cell
//! complexes.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cobar;
pub mod error;
pub mod linalg;
pub mod lyndon;
pub mod ncalgebra;
pub mod normal_form;
pub mod primes;
pub mod series;
pub mod snf;
pub mod spaces;

pub use error::{Error, Result};
