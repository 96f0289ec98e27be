//! Joint shortening and puncturing optimization for quasi-cyclic LDPC codes.
//!
//! - [`protograph`]: base matrices, lifting, column erasure, alist export
//! - [`pruning`]: pruning patterns, sub-patterns, rates, bit-level schedules
//! - [`pexit`]: protograph EXIT analysis and threshold bisection
//! - [`search`]: staged beam search over (shorten, puncture) column pairs
//! - [`codec`]: GF(2) encoder and sum-product decoder on the lifted code
//! - [`sim`]: Monte Carlo BER/FER harness over BPSK/AWGN

pub mod codec;
pub mod error;
mod gf2;
pub mod jfunc;
pub mod pexit;
pub mod protograph;
pub mod pruning;
pub mod search;
pub mod sim;
pub mod standard;

pub use error::{Error, Result};
pub use num_rational;
pub use protograph::{BaseMatrix, BinaryMatrix};
pub use pruning::{BitSchedule, PrunedMatrix, PruningPattern};
