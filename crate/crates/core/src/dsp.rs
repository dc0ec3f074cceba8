//! Receiver DSP: shot-noise calibration, frequency-offset compensation,
//! pilot-directed equalization and phase recovery, and the per-block
//! discard rule.

use crate::math::fft::{fft, next_pow2};
use crate::signal::frame::QuantumFrame;
use crate::{Complex64, Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Calibration of the receiver's shot-noise scale and trusted noise.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRecord {
    /// Variance of a shot-noise-only capture in raw units, per quadrature.
    pub snu_scale: f64,
    /// Electronic noise in shot-noise units.
    pub v_el: f64,
    /// `10 log10(shot variance / electronic variance)`, capped at 99 dB.
    pub clearance_db: f64,
    /// Product of the receiver loss factors.
    pub eta_total: f64,
}

/// Clearance cap used when the electronic trace is exactly zero.
pub const CLEARANCE_CAP_DB: f64 = 99.0;

fn variance(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    samples.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// Derives a calibration record from shot-noise and electronic-noise captures.
///
/// `snu_scale = Var(shot) - Var(elec)`, `v_el = Var(elec) / snu_scale`,
/// `eta_total` is the product of `eta_components`.
pub fn calibrate(
    shot_trace: &[f64],
    elec_trace: &[f64],
    eta_components: &[f64],
) -> Result<CalibrationRecord> {
    if shot_trace.len() < 2 || elec_trace.len() < 2 {
        return Err(Error::InvalidInput(String::from(
            "calibration traces need at least 2 samples",
        )));
    }
    let var_shot = variance(shot_trace);
    let var_elec = variance(elec_trace);
    if var_shot <= var_elec {
        return Err(Error::CalibrationFailure(format!(
            "shot variance {var_shot} not above electronic variance {var_elec}"
        )));
    }
    let snu_scale = var_shot - var_elec;
    let v_el = var_elec / snu_scale;
    let clearance_db = if v_el > 0.0 {
        (-10.0 * libm::log10(v_el)).min(CLEARANCE_CAP_DB)
    } else {
        CLEARANCE_CAP_DB
    };
    let mut eta_total = 1.0;
    for &e in eta_components {
        if !(e > 0.0 && e <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "loss factor {e} outside (0, 1]"
            )));
        }
        eta_total *= e;
    }
    Ok(CalibrationRecord {
        snu_scale,
        v_el,
        clearance_db,
        eta_total,
    })
}

/// Rescales raw-unit quadratures into shot-noise units.
pub fn normalize_to_snu(symbols: &[Complex64], cal: &CalibrationRecord) -> Vec<Complex64> {
    let s = 1.0 / libm::sqrt(cal.snu_scale);
    symbols.iter().map(|&z| z * s).collect()
}

/// Minimum pilot count accepted by the frequency-offset estimator.
pub const MIN_PILOTS_FOR_FOC: usize = 1024;

/// Estimates the carrier frequency offset from the pilot-conjugate product
/// spectrum: coarse FFT peak plus parabolic interpolation on log magnitude.
pub fn estimate_frequency_offset(rx: &[Complex64], frame: &QuantumFrame) -> Result<f64> {
    if rx.len() != frame.symbols.len() {
        return Err(Error::InvalidInput(format!(
            "rx length {} does not match frame length {}",
            rx.len(),
            frame.symbols.len()
        )));
    }
    let positions = frame.pilot_positions();
    if positions.len() < MIN_PILOTS_FOR_FOC {
        return Err(Error::InsufficientPilots {
            required: MIN_PILOTS_FOR_FOC,
            found: positions.len(),
        });
    }
    // Modulation-free pilot sequence, uniformly sampled at the pilot rate.
    let spacing = (positions[positions.len() - 1] - positions[0]) as f64
        / (positions.len() - 1) as f64;
    let pilot_rate = frame.symbol_rate / spacing;
    let n_fft = next_pow2(positions.len());
    let mut z = alloc::vec![Complex64::new(0.0, 0.0); n_fft];
    for (j, &p) in positions.iter().enumerate() {
        z[j] = rx[p] * frame.symbols[p].conj();
    }
    let raw: Vec<Complex64> = (0..positions.len()).map(|j| z[j]).collect();
    fft(&mut z);
    let peak = (0..n_fft)
        .max_by(|&a, &b| {
            z[a].norm_sqr()
                .partial_cmp(&z[b].norm_sqr())
                .unwrap_or(core::cmp::Ordering::Equal)
        })
        .unwrap();
    // Parabolic refinement on log magnitude around the peak.
    let mag = |idx: usize| -> f64 {
        let m = z[idx % n_fft].norm_sqr();
        0.5 * libm::log(m.max(1e-300))
    };
    let l = mag((peak + n_fft - 1) % n_fft);
    let c = mag(peak);
    let r = mag((peak + 1) % n_fft);
    let denom = l - 2.0 * c + r;
    let delta = if denom.abs() > 1e-12 {
        (0.5 * (l - r) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let mut bin = peak as f64 + delta;
    if bin > n_fft as f64 / 2.0 {
        bin -= n_fft as f64;
    }
    let coarse = bin * pilot_rate / n_fft as f64;
    // Autocorrelation refinement at increasing lags: after derotating by the
    // running estimate, the residual slope is the argument of the lag-m
    // autocorrelation divided by m. Each pass shrinks the residual well inside
    // the next lag's unambiguous range (+- pilot_rate / 2m).
    let mut refined = coarse;
    for &lag in &[1usize, 64, 4096] {
        if lag * 4 >= raw.len() {
            break;
        }
        let omega = -core::f64::consts::TAU * refined / pilot_rate;
        let mut acc = Complex64::new(0.0, 0.0);
        let derot: Vec<Complex64> = raw
            .iter()
            .enumerate()
            .map(|(j, &zj)| {
                let (s, cs) = libm::sincos(omega * j as f64);
                zj * Complex64::new(cs, s)
            })
            .collect();
        for j in lag..derot.len() {
            acc += derot[j] * derot[j - lag].conj();
        }
        refined += libm::atan2(acc.im, acc.re) / (core::f64::consts::TAU * lag as f64)
            * pilot_rate;
    }
    Ok(refined)
}

/// Removes a frequency offset estimate from a symbol stream.
pub fn compensate_frequency_offset(
    rx: &[Complex64],
    freq_offset_hz: f64,
    symbol_rate: f64,
) -> Vec<Complex64> {
    let omega = -2.0 * core::f64::consts::PI * freq_offset_hz / symbol_rate;
    rx.iter()
        .enumerate()
        .map(|(k, &z)| {
            let (s, c) = libm::sincos(omega * k as f64);
            z * Complex64::new(c, s)
        })
        .collect()
}

/// Least-squares complex gain fitted on the pilots.
pub fn fit_pilot_gain(rx: &[Complex64], frame: &QuantumFrame) -> Result<Complex64> {
    if rx.len() != frame.symbols.len() {
        return Err(Error::InvalidInput(String::from(
            "rx/frame length mismatch",
        )));
    }
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (i, &m) in frame.pilot_mask.iter().enumerate() {
        if m {
            num += frame.symbols[i].conj() * rx[i];
            den += frame.symbols[i].norm_sqr();
        }
    }
    if den <= 0.0 {
        return Err(Error::InvalidInput(String::from("zero pilot energy")));
    }
    let gain = num / den;
    if gain.norm_sqr() <= 0.0 {
        return Err(Error::InvalidInput(String::from(
            "zero received pilot power (all-zero input?)",
        )));
    }
    Ok(gain)
}

/// Applies the inverse of the least-squares pilot gain to the whole stream.
pub fn equalize(rx: &[Complex64], frame: &QuantumFrame) -> Result<Vec<Complex64>> {
    let gain = fit_pilot_gain(rx, frame)?;
    let inv = Complex64::new(1.0, 0.0) / gain;
    Ok(rx.iter().map(|&z| z * inv).collect())
}

/// Pilot-directed FIR equalizer for streams with residual inter-symbol
/// interference (the oversampled front end); `taps = 1` reduces to the
/// scalar gain.
///
/// Solves the least-squares filter `w` minimizing
/// `sum_p |pilot_p - w * rx[p - half .. p + half]|^2` over the pilots, then
/// applies it to the whole stream.
pub fn equalize_fir(rx: &[Complex64], frame: &QuantumFrame, taps: usize) -> Result<Vec<Complex64>> {
    if taps == 0 || taps % 2 == 0 {
        return Err(Error::InvalidArgument(String::from(
            "tap count must be odd and >= 1",
        )));
    }
    if taps == 1 {
        return equalize(rx, frame);
    }
    if rx.len() != frame.symbols.len() {
        return Err(Error::InvalidInput(String::from(
            "rx/frame length mismatch",
        )));
    }
    let half = taps / 2;
    // Normal equations R w = p with R the rx autocorrelation over pilot
    // windows and p the cross-correlation against the known pilots.
    let n = taps;
    let mut r = alloc::vec![Complex64::new(0.0, 0.0); n * n];
    let mut p_vec = alloc::vec![Complex64::new(0.0, 0.0); n];
    let mut used = 0usize;
    for (i, &m) in frame.pilot_mask.iter().enumerate() {
        if !m || i < half || i + half >= rx.len() {
            continue;
        }
        used += 1;
        for a in 0..n {
            let xa = rx[i - half + a];
            p_vec[a] += xa.conj() * frame.symbols[i];
            for b in 0..n {
                r[a * n + b] += xa.conj() * rx[i - half + b];
            }
        }
    }
    if used < 4 * taps {
        return Err(Error::InvalidInput(format!(
            "too few usable pilots ({used}) for a {taps}-tap equalizer"
        )));
    }
    // Diagonal loading keeps the solve stable for near-singular windows.
    let trace: f64 = (0..n).map(|a| r[a * n + a].re).sum();
    let load = 1e-9 * trace / n as f64;
    for a in 0..n {
        r[a * n + a] += load;
    }
    let w = solve_complex(&mut r, &mut p_vec, n)?;
    let mut out = Vec::with_capacity(rx.len());
    for i in 0..rx.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, &wa) in w.iter().enumerate() {
            let idx = i as isize - half as isize + a as isize;
            if idx >= 0 && (idx as usize) < rx.len() {
                acc += wa * rx[idx as usize];
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Gaussian elimination with partial pivoting for small complex systems.
fn solve_complex(a: &mut [Complex64], b: &mut [Complex64], n: usize) -> Result<Vec<Complex64>> {
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if a[row * n + col].norm_sqr() > a[pivot * n + col].norm_sqr() {
                pivot = row;
            }
        }
        if a[pivot * n + col].norm_sqr() < 1e-300 {
            return Err(Error::Numerical(String::from(
                "singular equalizer system",
            )));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let inv = Complex64::new(1.0, 0.0) / a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] * inv;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
            let bc = b[col];
            b[row] -= factor * bc;
        }
    }
    let mut x = alloc::vec![Complex64::new(0.0, 0.0); n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc -= a[col * n + k] * x[k];
        }
        x[col] = acc / a[col * n + col];
    }
    Ok(x)
}

fn wrap_to_pi(x: f64) -> f64 {
    let mut y = libm::remainder(x, core::f64::consts::TAU);
    if y > core::f64::consts::PI {
        y -= core::f64::consts::TAU;
    } else if y < -core::f64::consts::PI {
        y += core::f64::consts::TAU;
    }
    y
}

/// Pilot-aided carrier phase profile.
///
/// Per-pilot phase errors `arg(rx_p conj(pilot_p))` are vector-averaged over a
/// symmetric window spanning up to `window` pilots (shrinking at the block
/// edges so the window stays symmetric), then linearly interpolated to every
/// symbol position.
pub fn phase_profile(rx: &[Complex64], frame: &QuantumFrame, window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::InvalidArgument(String::from("window must be >= 1")));
    }
    if rx.len() != frame.symbols.len() {
        return Err(Error::InvalidInput(String::from(
            "rx/frame length mismatch",
        )));
    }
    let positions = frame.pilot_positions();
    let np = positions.len();
    if np == 0 {
        return Err(Error::InvalidInput(String::from("no pilots in frame")));
    }
    let phasors: Vec<Complex64> = positions
        .iter()
        .map(|&p| rx[p] * frame.symbols[p].conj())
        .collect();
    let half = window / 2;
    let mut pilot_phase = Vec::with_capacity(np);
    for j in 0..np {
        let h = half.min(j).min(np - 1 - j);
        let mut acc = Complex64::new(0.0, 0.0);
        for phasor in phasors.iter().take(j + h + 1).skip(j - h) {
            acc += *phasor;
        }
        pilot_phase.push(libm::atan2(acc.im, acc.re));
    }
    // Interpolate to all symbol positions, unwrapping between neighbours.
    let mut profile = alloc::vec![0.0; rx.len()];
    let mut seg = 0usize;
    for (k, item) in profile.iter_mut().enumerate() {
        while seg + 1 < np && positions[seg + 1] <= k {
            seg += 1;
        }
        *item = if k <= positions[0] {
            pilot_phase[0]
        } else if k >= positions[np - 1] {
            pilot_phase[np - 1]
        } else {
            let j = seg;
            let p0 = positions[j];
            let p1 = positions[j + 1];
            let d = wrap_to_pi(pilot_phase[j + 1] - pilot_phase[j]);
            pilot_phase[j] + d * (k - p0) as f64 / (p1 - p0) as f64
        };
    }
    Ok(profile)
}

/// Removes the pilot-aided phase profile from the stream.
pub fn recover_phase(rx: &[Complex64], frame: &QuantumFrame, window: usize) -> Result<Vec<Complex64>> {
    let profile = phase_profile(rx, frame, window)?;
    Ok(rx
        .iter()
        .zip(&profile)
        .map(|(&z, &phi)| {
            let (s, c) = libm::sincos(-phi);
            z * Complex64::new(c, s)
        })
        .collect())
}

/// Knobs of the block-level DSP chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DspConfig {
    /// Phase-recovery smoothing window, pilots.
    pub phase_window: usize,
    /// Blocks whose mean pilot SNR falls below this are declared
    /// unrecoverable.
    pub min_pilot_snr_db: f64,
    /// Run the FFT frequency-offset estimator (requires >= 1024 pilots).
    pub estimate_frequency: bool,
}

impl Default for DspConfig {
    fn default() -> Self {
        DspConfig {
            phase_window: 16,
            min_pilot_snr_db: 3.0,
            estimate_frequency: true,
        }
    }
}

/// Output of the block DSP chain.
#[derive(Debug, Clone)]
pub struct DspOutput {
    /// Phase-corrected quantum symbols with the channel gain left in
    /// (slope intact for parameter estimation), SNU.
    pub quantum: Vec<Complex64>,
    /// Phase-corrected, gain-equalized quantum symbols.
    pub equalized_quantum: Vec<Complex64>,
    pub freq_offset_hz: f64,
    /// Magnitude of the least-squares pilot gain.
    pub gain: f64,
    /// Mean pilot SNR estimate, dB.
    pub pilot_snr_db: f64,
    /// True when the block failed the pilot-SNR floor and symbols should be
    /// discarded.
    pub discarded: bool,
}

/// Runs frequency-offset compensation, pilot-aided phase recovery, the
/// equalizer fit and the discard rule on one received block.
///
/// The equalizer gain is fitted on the phase-corrected pilots so a residual
/// frequency error cannot shrink it.
pub fn process_block(rx: &[Complex64], frame: &QuantumFrame, cfg: &DspConfig) -> Result<DspOutput> {
    let (rx1, freq_hat) = if cfg.estimate_frequency {
        let f = estimate_frequency_offset(rx, frame)?;
        (compensate_frequency_offset(rx, f, frame.symbol_rate), f)
    } else {
        (rx.to_vec(), 0.0)
    };
    let corrected = recover_phase(&rx1, frame, cfg.phase_window)?;
    let gain = fit_pilot_gain(&corrected, frame)?;
    // Pilot SNR: fitted signal power over residual power on pilots.
    let mut sig = 0.0;
    let mut resid = 0.0;
    for (i, &m) in frame.pilot_mask.iter().enumerate() {
        if m {
            let model = frame.symbols[i] * gain;
            sig += model.norm_sqr();
            resid += (corrected[i] - model).norm_sqr();
        }
    }
    let snr = sig / resid.max(1e-300);
    let pilot_snr_db = 10.0 * libm::log10(snr.max(1e-300));
    let g = gain.norm();
    if pilot_snr_db < cfg.min_pilot_snr_db {
        return Ok(DspOutput {
            quantum: Vec::new(),
            equalized_quantum: Vec::new(),
            freq_offset_hz: freq_hat,
            gain: g,
            pilot_snr_db,
            discarded: true,
        });
    }
    let mut quantum = Vec::with_capacity(frame.n_quantum());
    let mut equalized = Vec::with_capacity(frame.n_quantum());
    for (i, &m) in frame.pilot_mask.iter().enumerate() {
        if !m {
            quantum.push(corrected[i]);
            equalized.push(corrected[i] / g);
        }
    }
    Ok(DspOutput {
        quantum,
        equalized_quantum: equalized,
        freq_offset_hz: freq_hat,
        gain: g,
        pilot_snr_db,
        discarded: false,
    })
}
