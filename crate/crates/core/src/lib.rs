//! Core algorithms for testing causal hypotheses that involve unobserved
//! variables of promised cardinality.
//!
//! The crate decides d-separation on causal DAGs, computes certified
//! lower/upper bounds on the nonnegative rank (and PSD rank) of observed
//! joint distributions, and compares the two: a certified nonnegative-rank
//! lower bound that exceeds the cardinality of every candidate hidden
//! separating set refutes the hypothesis and witnesses direct causal
//! influence.
//!
//! Everything here is pure computation over immutable values; IO, file
//! formats and the command-line front end live in the companion
//! `rankwitness-cli` crate. The crate is `no_std` (with `alloc`) so the
//! algorithmic core stays free of platform dependencies.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dist;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod matrix;
pub mod model;
pub mod protocol;
pub mod psd;
pub mod rank;
pub mod scalar;
pub mod witness;

pub use error::Error;
pub use matrix::Mat;
pub use scalar::{Rational, Scalar};
