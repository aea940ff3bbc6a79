//! Performance bounds for a full-duplex joint radar-communication node.
//!
//! The crate computes downlink and uplink rate bounds with imperfect CSI and
//! residual self-interference, Cramér-Rao bounds on target direction, delay
//! and Doppler for a coded LFM pulse train, and the joint rate regions that
//! result under simultaneous, time-shared and band-split operation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
#[cfg(feature = "cli")]
pub mod cli;
pub mod comm_rates;
pub mod config;
pub mod error;
pub mod radar_est;
pub mod scenarios;
pub mod waveforms;

pub use error::{JrcError, Result};
