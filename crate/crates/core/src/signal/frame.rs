//! Pilot-interleaved transmit frames.

use super::constellation::Constellation;
use crate::math::rng::Rng;
use crate::{Complex64, Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// A transmit frame of interleaved pilot and quantum symbols.
///
/// `symbols` are quadrature displacements in shot-noise units: quantum
/// positions carry `2 * alpha` for a constellation point `alpha` (so their
/// per-quadrature variance is the constellation's `va`); pilot positions carry
/// QPSK phasors of magnitude `pilot_amplitude`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumFrame {
    pub symbols: Vec<Complex64>,
    pub pilot_mask: Vec<bool>,
    /// Ground-truth quantum symbols, in transmission order.
    pub tx_quantum: Vec<Complex64>,
    /// Symbol rate, baud.
    pub symbol_rate: f64,
}

impl QuantumFrame {
    pub fn n_pilots(&self) -> usize {
        self.pilot_mask.iter().filter(|&&m| m).count()
    }

    pub fn n_quantum(&self) -> usize {
        self.symbols.len() - self.n_pilots()
    }

    /// Indices of pilot positions.
    pub fn pilot_positions(&self) -> Vec<usize> {
        self.pilot_mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect()
    }
}

/// Pilot position rule: evenly spaced with density `ratio`, starting at 0.
/// A ratio of 1/2 alternates pilot/quantum exactly.
fn is_pilot(index: usize, ratio: f64) -> bool {
    if index == 0 {
        return true;
    }
    libm::floor(index as f64 * ratio) > libm::floor((index as f64 - 1.0) * ratio)
}

/// Builds a frame of `n` symbols with quantum data drawn i.i.d. from `c` and
/// QPSK pilots of magnitude `pilot_amplitude` interleaved at `pilot_ratio`.
///
/// Deterministic for a fixed seed.
pub fn build_frame(
    c: &Constellation,
    n: usize,
    pilot_ratio: f64,
    pilot_amplitude: f64,
    symbol_rate: f64,
    seed: u64,
) -> Result<QuantumFrame> {
    if !(pilot_ratio > 0.0 && pilot_ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "pilot_ratio must lie in (0, 1), got {pilot_ratio}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("frame length 0".into()));
    }
    if !(pilot_amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pilot_amplitude must be > 0, got {pilot_amplitude}"
        )));
    }
    let mut rng = Rng::new(seed);
    let mut symbols = Vec::with_capacity(n);
    let mut pilot_mask = Vec::with_capacity(n);
    let mut tx_quantum = Vec::new();
    // QPSK pilot alphabet at 45/135/225/315 degrees. Pilots are drawn
    // randomly: a deterministic pilot pattern is predictable from its
    // neighbours and would bias data-directed fits.
    let comp = pilot_amplitude / libm::sqrt(2.0);
    let pilot_alphabet = [
        Complex64::new(comp, comp),
        Complex64::new(-comp, comp),
        Complex64::new(-comp, -comp),
        Complex64::new(comp, -comp),
    ];
    for i in 0..n {
        if is_pilot(i, pilot_ratio) {
            symbols.push(pilot_alphabet[(rng.next_u64() & 3) as usize]);
            pilot_mask.push(true);
        } else {
            let alpha = c.points[c.sample_index(rng.uniform())];
            let displacement = alpha * 2.0;
            symbols.push(displacement);
            tx_quantum.push(displacement);
            pilot_mask.push(false);
        }
    }
    Ok(QuantumFrame {
        symbols,
        pilot_mask,
        tx_quantum,
        symbol_rate,
    })
}
