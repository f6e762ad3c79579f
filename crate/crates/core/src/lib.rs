//! Sequential CHSH nonlocality sharing between one Alice and k independent
//! Bobs, under three Kraus realizations of the same two-outcome POVM.
//!
//! The crate has two faces that check each other:
//!
//! - [`engine`] evolves the 4×4 density matrix through each Bob's
//!   unselective channel and evaluates CHSH values numerically;
//! - [`chsh`] carries the closed-form expressions, sum-of-squares bounds and
//!   critical parameters, and [`synthesis`] builds parameter sequences under
//!   which every Bob in the chain violates CHSH.
//!
//! [`verify`] packages the cross-checks as seeded suites; the `chsh-share`
//! binary exposes simulation, synthesis, trade-off curves and verification
//! on the command line.

pub mod chsh;
pub mod engine;
pub mod error;
pub mod protocol;
pub mod qmath;
pub mod report;
pub mod synthesis;
pub mod verify;

pub use error::{Error, Result};
