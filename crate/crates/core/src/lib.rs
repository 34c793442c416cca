//! Duty-cycled LoRa sensor networks with decode-and-forward relays.
//!
//! The crate pairs a deterministic discrete-event simulator with an
//! analytical model of the measurement loss probability, so that each can
//! be checked against the other.

pub mod allocator;
pub mod analytic;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod monte_carlo;
pub mod phy;
pub mod rng;
pub mod sim;

pub use error::{ConfigError, Error, Result};
