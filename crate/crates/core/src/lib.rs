//! B-free integers for `B = {2^i·b_i}` (pairwise coprime odd `b_i > 1`), the
//! Toeplitz structure of their characteristic sequence, the odometer factor,
//! and finite checks showing the automorphism group of the subshift is trivial.

pub mod arithmetic;
pub mod automorphism;
pub mod bfree;
pub mod counterexample;
pub mod error;
pub mod odometer;
pub mod toeplitz;
pub mod word;

pub use bfree::BFreeFamily;
pub use error::{Error, Result};
pub use word::{Cell, SymbolWindow};
