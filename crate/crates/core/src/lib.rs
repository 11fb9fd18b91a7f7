//! Double-tripod atom-light coupling: dressed states, geometric gauge
//! potentials, spin-orbit bands and wavepacket dynamics.
//!
//! Units: ħ = 1. The laser wave number κ and the atomic mass m are free
//! parameters; E_r = κ²/2m is the natural energy scale.

// `!(a <= b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod atomlight;
pub mod bands;
pub mod dynamics;
pub mod error;
pub mod gauge;
pub mod io;
pub mod units;
pub mod validation;

pub use error::{Error, Result};
