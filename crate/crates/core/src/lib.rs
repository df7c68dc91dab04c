//! Finite combinatorics for effective subshifts: words and partial patterns,
//! natural-number codings, oracle operators, the layered Toeplitz skeleton,
//! universal-subshift builders and the certification search.
//!
//! The crate is `no_std` with `alloc`; the `std` feature adds
//! `std::error::Error` impls and the certifier, whose exact search needs a
//! SAT solver.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(feature = "std")]
pub mod certify;
pub mod codec;
pub mod decode;
pub mod error;
pub mod lang;
pub mod oracle;
pub mod pattern;
pub mod skeleton;
pub mod transform;
pub mod universal;

pub use error::{Error, Result};
pub use pattern::{Alphabet, Letter, PartialPattern, SubshiftSpec, Word};
