//! Exact information-theoretic testbed for domain-invariant prediction.
//!
//! Everything here works on dense probability tables over small finite
//! alphabets, so every quantity is computed exactly (up to `f64` round-off)
//! rather than estimated from samples.
//!
//! The crate is split into three layers:
//!
//! - [`prob`]: alphabets, joint distributions, channels and the information
//!   measures built on them (entropy, mutual information, conditional mutual
//!   information, channel composition).
//! - [`scenario`]: multi-site "scanner" worlds `p(y, s) p(x | y, s)` with
//!   closed-form parametric scanners, random instance generation and per-site
//!   information profiles.
//! - [`lab`]: encoders `q(z | x)`, Bayes predictors, exact reports, the
//!   deterministic-encoder enumeration oracle, the penalized encoder optimizer,
//!   trade-off frontiers and the two invariance audits.
//!
//! All information is measured in bits.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod lab;
pub mod prob;
pub mod scenario;

pub use error::{Error, Result};
