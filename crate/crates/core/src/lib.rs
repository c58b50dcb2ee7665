//! Relative entropy coding for singular channels.
//!
//! This crate implements a stack of channel-simulation codes over an exact,
//! invertible asymmetric-numeral-system stream coder:
//!
//! - [`bbrs`]: the bits-back rejection sampler, a two-part code that encodes
//!   the quantised log-density ratio implicitly and recovers the bits spent
//!   on it through the channel's singularity witness.
//! - [`samplers`]: plain rejection sampling, greedy rejection sampling and
//!   the exponential-race sample selection used by the PFR code.
//! - [`pfr`]: the improved Poisson-functional-representation two-part code.
//! - [`hamming`]: a toy bits-back entropy coder for the (7,4,3)-Hamming
//!   source showing the invertible-sampling + error-correction pipeline.
//!
//! All probabilities are exact rationals; every bit decision made by an
//! encoder or decoder is an exact integer comparison, so round trips restore
//! the stream bit-for-bit.

pub mod ans;
pub mod bbrs;
pub mod bec_product;
pub mod channel;
pub mod codes;
pub mod gamma;
pub mod hamming;
pub mod numerics;
pub mod pfr;
pub mod randomness;
pub mod samplers;
pub mod stats;
pub mod sweep;

mod error;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
