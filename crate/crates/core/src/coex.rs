//! Classical-channel coexistence bookkeeping: generalized mutual information
//! for bit-interleaved QAM over AWGN, aggregate throughput arithmetic, and the
//! lumped leakage coupling into quantum excess noise.

use crate::math::rng::Rng;
use crate::{Complex64, Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Wavelength-multiplexed classical channel plan.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalPlan {
    pub n_channels: usize,
    /// Symbols per second per channel.
    pub baud: f64,
    /// Bits per transmitted symbol entering the raw-rate product.
    pub bits_per_symbol: u32,
    /// Overall coding rate (FEC x framing), applied to the raw rate.
    pub fec_rate: f64,
    /// Channel grid spacing, Hz.
    pub grid_spacing_hz: f64,
    /// Grid centre frequency, Hz.
    pub center_freq_hz: f64,
}

impl ClassicalPlan {
    pub fn validate(&self) -> Result<()> {
        if self.baud <= 0.0 || self.bits_per_symbol == 0 {
            return Err(Error::InvalidArgument(
                "baud and bits_per_symbol must be positive".into(),
            ));
        }
        if !(self.fec_rate > 0.0 && self.fec_rate <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "fec_rate outside (0,1]: {}",
                self.fec_rate
            )));
        }
        if self.grid_spacing_hz <= 0.0 || self.center_freq_hz <= 0.0 {
            return Err(Error::InvalidArgument(
                "grid parameters must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Raw and net aggregate throughput, bits per second.
pub fn classical_throughput(plan: &ClassicalPlan) -> (f64, f64) {
    let raw = plan.n_channels as f64 * plan.baud * plan.bits_per_symbol as f64;
    (raw, raw * plan.fec_rate)
}

/// Normalized GMI of hard transmitted bits against per-bit LLRs.
///
/// `GMI = m - (1/n) sum log2(1 + exp(-(-1)^b L))` with `L = ln(P0/P1)`;
/// the result is divided by `m`. `tx_bits` and `llrs` are row-major
/// `n x m` arrays.
pub fn ngmi(tx_bits: &[u8], llrs: &[f64], m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if tx_bits.len() != llrs.len() || tx_bits.len() % m != 0 || tx_bits.is_empty() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} bits vs {} llrs (m = {m})",
            tx_bits.len(),
            llrs.len()
        )));
    }
    let n = (tx_bits.len() / m) as f64;
    let mut penalty = 0.0;
    for (&b, &l) in tx_bits.iter().zip(llrs) {
        let u = if b == 0 { -l } else { l };
        // log2(1 + e^u), stable in both tails.
        penalty += if u > 0.0 {
            (u + libm::log1p(libm::exp(-u))) / core::f64::consts::LN_2
        } else {
            libm::log1p(libm::exp(u)) / core::f64::consts::LN_2
        };
    }
    let gmi = m as f64 - penalty / n;
    Ok(gmi / m as f64)
}

/// FEC feasibility rule: the channel supports a code when its NGMI clears the
/// code's threshold (0.83 for the rate-4/5 family used in the throughput
/// arithmetic).
pub fn supports_fec(ngmi_value: f64, ngmi_threshold: f64) -> bool {
    ngmi_value >= ngmi_threshold
}

/// Excess-noise contribution of in-band classical leakage, referred to the
/// channel input: `xi_add = leak / T`.
pub fn leakage_excess_noise(leak_photons: f64, transmittance: f64) -> Result<f64> {
    if !(leak_photons >= 0.0) {
        return Err(Error::InvalidArgument("leakage must be >= 0".into()));
    }
    if !(transmittance > 0.0) {
        return Err(Error::InvalidArgument(
            "transmittance must be > 0 to refer leakage to the input".into(),
        ));
    }
    Ok(leak_photons / transmittance)
}

/// Gray-labelled square QAM constellation with unit mean symbol energy.
///
/// Returns `(points, labels)`; labels pack the per-axis Gray codes with the
/// in-phase bits in the high half.
pub fn qam_constellation(order: u32) -> Result<(Vec<Complex64>, Vec<u32>)> {
    let bits = match order {
        4 => 2,
        16 => 4,
        64 => 6,
        256 => 8,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unsupported QAM order {order}"
            )))
        }
    };
    let side = 1u32 << (bits / 2);
    // Mean energy of the odd-integer grid: 2 (side^2 - 1) / 3 per complex dim.
    let scale = libm::sqrt(3.0 / (2.0 * (side * side - 1) as f64));
    let gray = |k: u32| k ^ (k >> 1);
    let mut points = Vec::with_capacity(order as usize);
    let mut labels = Vec::with_capacity(order as usize);
    for i in 0..side {
        for q in 0..side {
            let re = (2.0 * i as f64 - (side - 1) as f64) * scale;
            let im = (2.0 * q as f64 - (side - 1) as f64) * scale;
            points.push(Complex64::new(re, im));
            labels.push((gray(i) << (bits / 2)) | gray(q));
        }
    }
    Ok((points, labels))
}

/// Simulated QAM transmission over AWGN with exact log-sum-exp bit LLRs.
///
/// Returns `(tx_bits, llrs)` in row-major `n x m` layout. `snr_db` is
/// `Es/N0`; the per-quadrature noise variance is `1 / (2 snr)`.
pub fn simulate_qam_awgn(
    order: u32,
    snr_db: f64,
    n_symbols: usize,
    seed: u64,
) -> Result<(Vec<u8>, Vec<f64>)> {
    let (points, labels) = qam_constellation(order)?;
    let m = libm::log2(order as f64) as usize;
    let snr = libm::pow(10.0, snr_db / 10.0);
    let sigma = libm::sqrt(0.5 / snr);
    let inv_n0 = snr; // 1 / N0 with N0 = 2 sigma^2
    let mut rng = Rng::new(seed);
    let mut tx_bits = Vec::with_capacity(n_symbols * m);
    let mut llrs = Vec::with_capacity(n_symbols * m);
    let n_points = points.len();
    for _ in 0..n_symbols {
        let idx = (rng.next_u64() % n_points as u64) as usize;
        let x = points[idx];
        let label = labels[idx];
        let y = Complex64::new(x.re + sigma * rng.normal(), x.im + sigma * rng.normal());
        // Exact bit metrics: d_k = -|y - x_k|^2 / N0, combined per bit with
        // log-sum-exp stabilized by the global maximum.
        let mut metrics = Vec::with_capacity(n_points);
        let mut dmax = f64::NEG_INFINITY;
        for &p in &points {
            let d = -(y - p).norm_sqr() * inv_n0;
            dmax = dmax.max(d);
            metrics.push(d);
        }
        for bit in (0..m).rev() {
            let mask = 1u32 << bit;
            let mut s0 = 0.0;
            let mut s1 = 0.0;
            for (k, &d) in metrics.iter().enumerate() {
                let w = libm::exp(d - dmax);
                if labels[k] & mask == 0 {
                    s0 += w;
                } else {
                    s1 += w;
                }
            }
            let llr = libm::log(s0.max(1e-300)) - libm::log(s1.max(1e-300));
            tx_bits.push(if label & mask == 0 { 0 } else { 1 });
            llrs.push(llr);
        }
    }
    Ok((tx_bits, llrs))
}
