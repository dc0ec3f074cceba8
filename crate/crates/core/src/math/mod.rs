//! Numerical support: seedable RNG, special functions, adaptive quadrature,
//! FFT, derivative-free minimization and small dense linear algebra.
//!
//! Everything here is self-contained and deterministic so that simulation
//! output is bit-reproducible for a fixed seed.

pub mod fft;
pub mod linalg;
pub mod optim;
pub mod quad;
pub mod rng;
pub mod special;
