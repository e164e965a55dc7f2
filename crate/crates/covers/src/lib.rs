//! Covers (quasiperiods) of packed strings.
//!
//! A string C is a *cover* of T when occurrences of C in T overlap or touch
//! enough to tile every position of T. Every cover is a border, so the set of
//! cover lengths sits inside the border chain, and it turns out the whole set
//! can be written down as O(log^2 n) arithmetic progressions. This crate
//! computes that representation for texts stored in bit-packed form, where a
//! machine word holds many symbols and the interesting cost model counts
//! word operations rather than symbol comparisons.
//!
//! The main entry points:
//!
//! - [`cover_algorithms::covers`] computes all cover lengths of a packed text
//!   in word operations sublinear in n (for small alphabets).
//! - [`cover_array_ds::CoverArrayIndex`] answers "shortest cover of the
//!   length-l prefix" in O(1) machine operations from an index of
//!   O(n / log_sigma n) words.
//! - [`fibonacci`] evaluates the closed-form cover array of Fibonacci strings.
//! - [`lower_bound`] runs an adversary that forces any cover algorithm in the
//!   PILLAR query model to spend Omega(n / log^2 n) queries.
//!
//! Everything bottoms out in [`packed_text::PackedText`], a plain `Vec<u64>`
//! with symbols of ceil(log2 sigma) bits each, and [`pillar::Counters`], the
//! operation-counting harness used by the tests and benches to check the
//! advertised complexities empirically.

pub mod bits;
pub mod cover_algorithms;
pub mod cover_array_ds;
pub mod error;
pub mod fibonacci;
pub mod ipm_index;
pub mod lower_bound;
pub mod oracles;
pub mod packed_text;
pub mod pillar;
pub mod progressions;
pub mod sweep;

pub use error::CoverError;
pub use packed_text::PackedText;
pub use progressions::{CoverSet, Progression};
