//! Wavepacket propagation in the reduced (two-component) and full
//! (five-level) representations.

pub mod adiabatic;
pub mod field;
pub mod frames;
pub mod full;
pub mod grid;
pub mod reduced;
pub mod report;
pub mod zitter;

pub use adiabatic::{compare_adiabatic, AdiabaticRow, DEFAULT_PHASE_BUDGET};
pub use field::{gaussian_envelope, gaussian_packet, FullField, PacketParams, SpinorField};
pub use frames::FrameGrid;
pub use full::{evolve_full, FullPropagator};
pub use grid::{Fft2, GridSpec};
pub use reduced::{evolve_reduced, ReducedPropagator};
pub use report::{EvolutionReport, Representation, Sample};
pub use zitter::{band_weights, dominant_frequency, mean_band_splitting};
