//! Zak-OTFS link-level simulation.
//!
//! The crate is split along the signal chain:
//!
//! - [`dd`]: delay-Doppler algebra (grids, quasi-periodic signals, Zak
//!   transforms, pulsones, ambiguity functions, twisted convolution).
//! - [`channel`]: time-varying multipath channels, effective-channel sampling
//!   with RRC shaping, channel matrices and noise.
//! - [`frames`]: QAM constellations, frame construction for the data-only,
//!   spread-pilot and point-pilot schemes, and energy accounting.
//! - [`receiver`]: cross-ambiguity channel estimation, pilot removal, LMMSE
//!   detection and the decision-directed (differential) session loop.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod dd;
mod error;
pub mod frames;
pub mod receiver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
