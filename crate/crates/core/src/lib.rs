//! Link-level MIMO-OFDM simulation of single-antenna and multi-antenna
//! jammers that do or do not respect the OFDM cyclic prefix, and of
//! per-subcarrier orthogonal-projection nulling against them.
//!
//! The modules follow the signal chain: [`ofdm`] framing and transforms,
//! [`channel`] generation and application, [`jammer`] streams and the
//! effective per-subcarrier jammer channel, [`receiver`] nulling and
//! detection, [`analysis`] of interference subspaces, and [`harness`] for
//! Monte-Carlo sweeps and result files.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod harness;
pub mod jammer;
pub mod linalg;
pub mod ofdm;
pub mod receiver;

pub use error::{Error, Result};
