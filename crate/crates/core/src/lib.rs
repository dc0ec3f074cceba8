//! Core simulation and analysis library for continuous-variable QKD over a
//! turbulent free-space intensity channel, with classical-channel coexistence
//! bookkeeping.
//!
//! Everything in this crate is pure: given explicit inputs and seeds, every
//! operation is deterministic and safe to call concurrently. IO, file formats
//! and the command-line frontend live in the companion `fsoqkd` crate.
//!
//! Conventions used throughout:
//!
//! * Quadratures are expressed in shot-noise units (SNU): the vacuum/shot
//!   variance per quadrature is 1.
//! * Transmitted symbols are quadrature displacements; a constellation with
//!   modulation variance `va` produces a symbol stream whose per-quadrature
//!   variance is `va`.
//! * Heterodyne detection: both quadratures measured, amplitude gain
//!   `t = sqrt(eta * T / 2)`, additive noise per quadrature
//!   `1 + v_el + (eta * T / 2) * xi` with `xi` referred to the channel input.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coex;
pub mod dsp;
pub mod math;
pub mod scenario;
pub mod security;
pub mod signal;
pub mod turbulence;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Complex sample type used for all IQ data.
pub type Complex64 = num_complex::Complex<f64>;
