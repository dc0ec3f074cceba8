//! Physical channel and heterodyne detection model at one sample per symbol.

use super::frame::QuantumFrame;
use crate::math::rng::Rng;
use crate::{Complex64, Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// One block's channel and detector state.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Intensity transmittance of the free-space path for this block.
    pub transmittance: f64,
    /// Excess noise injected at the channel input, shot-noise units.
    pub xi: f64,
    /// Carrier frequency offset between signal and local oscillator, Hz.
    pub freq_offset_hz: f64,
    /// Total laser linewidth (sum of both lasers), Hz.
    pub linewidth_hz: f64,
    /// Detector quantum efficiency.
    pub eta: f64,
    /// Electronic noise, shot-noise units per quadrature.
    pub v_el: f64,
    /// Multiplier on the additive noise amplitude; 1.0 is physical, 0.0
    /// disables noise for loopback diagnostics.
    pub noise_scale: f64,
}

impl ChannelRealization {
    pub fn new(transmittance: f64, xi: f64, eta: f64, v_el: f64) -> Self {
        ChannelRealization {
            transmittance,
            xi,
            freq_offset_hz: 0.0,
            linewidth_hz: 0.0,
            eta,
            v_el,
            noise_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.transmittance) {
            return Err(Error::InvalidArgument(format!(
                "transmittance must lie in [0, 1], got {}",
                self.transmittance
            )));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "eta must lie in (0, 1], got {}",
                self.eta
            )));
        }
        if !(self.v_el >= 0.0) {
            return Err(Error::InvalidArgument("v_el must be >= 0".into()));
        }
        if !(self.xi >= 0.0) {
            return Err(Error::InvalidArgument("xi must be >= 0".into()));
        }
        if !(self.noise_scale >= 0.0) {
            return Err(Error::InvalidArgument("noise_scale must be >= 0".into()));
        }
        Ok(())
    }

    /// Heterodyne amplitude gain `t = sqrt(eta T / 2)`.
    pub fn amplitude_gain(&self) -> f64 {
        libm::sqrt(self.eta * self.transmittance / 2.0)
    }

    /// Per-quadrature additive noise variance `1 + v_el + (eta T / 2) xi`.
    pub fn noise_variance(&self) -> f64 {
        1.0 + self.v_el + 0.5 * self.eta * self.transmittance * self.xi
    }
}

/// Wiener laser phase walk: increment variance `2 pi linewidth / rate` per
/// symbol, starting from phase zero.
pub fn wiener_phase(n: usize, linewidth_hz: f64, symbol_rate: f64, rng: &mut Rng) -> Vec<f64> {
    let step = libm::sqrt((2.0 * core::f64::consts::PI * linewidth_hz / symbol_rate).max(0.0));
    let mut phases = Vec::with_capacity(n);
    let mut theta = 0.0;
    for _ in 0..n {
        phases.push(theta);
        theta += step * rng.normal();
    }
    phases
}

/// Propagates a frame through the channel and heterodyne detector.
///
/// `y_k = t x_k e^{i (2 pi df k / R + theta_k)} + n_k` with
/// `t = sqrt(eta T / 2)`, Wiener phase noise `theta`, and circular Gaussian
/// noise of per-quadrature variance `1 + v_el + (eta T / 2) xi`.
/// Deterministic for a fixed seed.
pub fn apply_channel(frame: &QuantumFrame, ch: &ChannelRealization, seed: u64) -> Result<Vec<Complex64>> {
    ch.validate()?;
    let t = ch.amplitude_gain();
    let sigma = libm::sqrt(ch.noise_variance()) * ch.noise_scale;
    let omega = 2.0 * core::f64::consts::PI * ch.freq_offset_hz / frame.symbol_rate;
    let phase_step = libm::sqrt(
        (2.0 * core::f64::consts::PI * ch.linewidth_hz / frame.symbol_rate).max(0.0),
    );
    let mut rng = Rng::new(seed);
    let mut theta = 0.0f64;
    let mut out = Vec::with_capacity(frame.symbols.len());
    for (k, &x) in frame.symbols.iter().enumerate() {
        let phi = omega * k as f64 + theta;
        let (s, c) = libm::sincos(phi);
        let rot = Complex64::new(c, s);
        let noise = Complex64::new(sigma * rng.normal(), sigma * rng.normal());
        out.push(x * t * rot + noise);
        theta += phase_step * rng.normal();
    }
    Ok(out)
}
