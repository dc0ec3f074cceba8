//! Mutual information, finite-size penalty and secret-key-rate assembly.

use super::estimate::ChannelEstimate;
use super::holevo::holevo_bound_gaussian;
use super::SecurityParams;
use crate::{Error, Result};
use alloc::format;

/// Heterodyne mutual information with trusted detector noise, bits/symbol.
///
/// `I = log2((V + chi_tot) / (1 + chi_tot))` with `V = va + 1`,
/// `chi_tot = (1-T)/T + xi + chi_het / T`, `chi_het = (2 - eta + 2 v_el)/eta`.
/// Returns 0 for a dead channel.
pub fn mutual_information(va: f64, t: f64, xi: f64, eta: f64, v_el: f64) -> Result<f64> {
    if !(va > 0.0) {
        return Err(Error::InvalidArgument(format!("va must be > 0, got {va}")));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidArgument(format!("eta outside (0,1]: {eta}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "transmittance outside (0,1]: {t}"
        )));
    }
    let v = va + 1.0;
    let chi_line = (1.0 - t) / t + xi;
    let chi_het = (2.0 - eta + 2.0 * v_el) / eta;
    let chi_tot = chi_line + chi_het / t;
    Ok(libm::log2((v + chi_tot) / (1.0 + chi_tot)))
}

/// Finite-size penalty `Delta(n) = 7 sqrt(log2(2 / eps_smooth) / n)`,
/// bits/symbol.
pub fn finite_size_penalty(n: usize, eps_smooth: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be > 0".into()));
    }
    if !(eps_smooth > 0.0 && eps_smooth < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eps_smooth outside (0,1): {eps_smooth}"
        )));
    }
    Ok(7.0 * libm::sqrt(libm::log2(2.0 / eps_smooth) / n as f64))
}

/// Throughput accounting: symbol rate and the duty factors that scale
/// per-symbol rates into bits per second.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputChain {
    pub symbol_rate: f64,
    pub duty_pilot: f64,
    pub duty_calibration: f64,
    pub duty_parameter_estimation: f64,
}

impl Default for ThroughputChain {
    fn default() -> Self {
        ThroughputChain {
            symbol_rate: 250e6,
            duty_pilot: 0.5,
            duty_calibration: 0.5,
            duty_parameter_estimation: 0.5,
        }
    }
}

impl ThroughputChain {
    pub fn duty_product(&self) -> f64 {
        self.duty_pilot * self.duty_calibration * self.duty_parameter_estimation
    }
}

/// Per-block secret-key-rate report.
#[derive(Debug, Clone, PartialEq)]
pub struct SkrReport {
    /// Mutual information at the point estimates, bits/symbol.
    pub i_ab: f64,
    /// Holevo bound, bits/symbol (worst-case parameters when requested).
    pub chi_be: f64,
    /// Finite-size penalty, bits/symbol.
    pub delta_fs: f64,
    /// Unclamped asymptotic-style rate `beta I - chi - Delta`, bits/symbol.
    pub skr_raw: f64,
    /// Headline per-symbol secret key rate, `max(0, skr_raw)`.
    pub skr_symbol: f64,
    /// Net per-symbol rate after frame-error and disclosure accounting,
    /// `max(0, (1 - fer)(1 - pe_fraction) skr_raw)`.
    pub skr_net_symbol: f64,
    /// Key throughput, `skr_symbol * symbol_rate * duty factors`.
    pub skr_bps: f64,
    /// Block was unusable (degenerate estimate or discarded by DSP).
    pub discarded: bool,
}

impl SkrReport {
    pub fn discarded() -> Self {
        SkrReport {
            i_ab: 0.0,
            chi_be: 0.0,
            delta_fs: 0.0,
            skr_raw: 0.0,
            skr_symbol: 0.0,
            skr_net_symbol: 0.0,
            skr_bps: 0.0,
            discarded: true,
        }
    }
}

/// Assembles the per-block secret key rate from a channel estimate.
///
/// The Holevo term is evaluated at the point estimates by default, or at the
/// worst-case bounds when `params.use_worst_case` is set; excess noise is
/// floored at zero inside the Holevo term (a negative estimate would flatter
/// Eve's bound). The mutual information uses the unclamped point estimates.
pub fn compute_skr(
    est: &ChannelEstimate,
    params: &SecurityParams,
    chain: &ThroughputChain,
) -> Result<SkrReport> {
    params.validate()?;
    if est.degenerate {
        return Ok(SkrReport::discarded());
    }
    let t_point = est.capital_t_hat.clamp(1e-12, 1.0);
    let i_ab = mutual_information(params.va, t_point, est.xi_hat, params.eta, params.v_el)?;
    let (t_chi, xi_chi) = if params.use_worst_case {
        (est.t_worst.clamp(1e-12, 1.0), est.xi_worst.max(0.0))
    } else {
        (t_point, est.xi_hat.max(0.0))
    };
    let chi_be = holevo_bound_gaussian(params.va, t_chi, xi_chi, params.eta, params.v_el)?;
    let n_key = ((params.n_block as f64) * (1.0 - params.pe_fraction)) as usize;
    let delta_fs = finite_size_penalty(n_key.max(1), params.eps_smooth)?;
    let skr_raw = params.beta * i_ab - chi_be - delta_fs;
    let skr_symbol = skr_raw.max(0.0);
    let skr_net_symbol = ((1.0 - params.fer) * (1.0 - params.pe_fraction) * skr_raw).max(0.0);
    let skr_bps = skr_symbol * chain.symbol_rate * chain.duty_product();
    Ok(SkrReport {
        i_ab,
        chi_be,
        delta_fs,
        skr_raw,
        skr_symbol,
        skr_net_symbol,
        skr_bps,
        discarded: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::security::estimate::ChannelEstimate;

    fn nominal_params() -> SecurityParams {
        SecurityParams::default()
    }

    #[test]
    fn mutual_information_ideal_channel() {
        // va=8, T=1, xi=0, eta=1, v_el=0: I = log2(10/2) = log2(5).
        let i = mutual_information(8.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        assert!((i - libm::log2(5.0)).abs() < 1e-9, "{i}");
    }

    #[test]
    fn mutual_information_nominal_point() {
        // chi_line = 1.2571, chi_tot = 13.162, I = 0.6461.
        let t: f64 = 0.444;
        let xi = 0.0048;
        let chi_line = (1.0 - t) / t + xi;
        assert!((chi_line - 1.2571).abs() < 1e-4);
        let chi_het = (2.0 - 0.35 + 0.2) / 0.35;
        let chi_tot = chi_line + chi_het / t;
        assert!((chi_tot - 13.162).abs() < 1e-3);
        let i = mutual_information(8.0, t, xi, 0.35, 0.1).unwrap();
        assert!((i - 0.6461).abs() < 1e-3, "{i}");
    }

    #[test]
    fn mutual_information_vanishes_with_noise() {
        let mut prev = f64::INFINITY;
        for &xi in &[0.0, 0.1, 1.0, 10.0, 1000.0] {
            let i = mutual_information(8.0, 0.5, xi, 0.35, 0.1).unwrap();
            assert!(i < prev, "xi={xi}: {i} not below {prev}");
            assert!(i > 0.0);
            prev = i;
        }
        assert!(prev < 0.02);
        assert_eq!(mutual_information(8.0, 0.0, 0.0, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn finite_size_anchor_and_scaling() {
        let d = finite_size_penalty(500_000, 1e-10).unwrap();
        assert!((d - 0.05791).abs() < 1e-5, "{d}");
        // Monotone decreasing in n.
        let mut prev = f64::INFINITY;
        for &n in &[1_000usize, 10_000, 100_000, 1_000_000, 10_000_000] {
            let v = finite_size_penalty(n, 1e-10).unwrap();
            assert!(v < prev);
            prev = v;
        }
        // Scaling law: Delta(10 n) = Delta(n) / sqrt(10).
        let a = finite_size_penalty(5_000_000, 1e-10).unwrap();
        let ratio = a / d;
        assert!((ratio - 1.0 / libm::sqrt(10.0)).abs() < 1e-9, "{ratio}");
    }

    #[test]
    fn skr_nominal_operating_point() {
        let est = ChannelEstimate::exact(0.444, 0.0048, 0.35, 500_000);
        let report = compute_skr(&est, &nominal_params(), &ThroughputChain::default()).unwrap();
        assert!(
            (report.skr_symbol - 0.037).abs() < 0.010,
            "skr {}",
            report.skr_symbol
        );
        assert!(!report.discarded);
        // bps identity.
        let expect_bps = report.skr_symbol * 250e6 * 0.125;
        assert_eq!(report.skr_bps, expect_bps);
    }

    #[test]
    fn skr_clamps_at_zero() {
        let est = ChannelEstimate::exact(0.444, 0.5, 0.35, 500_000);
        let report = compute_skr(&est, &nominal_params(), &ThroughputChain::default()).unwrap();
        assert!(report.skr_raw < 0.0);
        assert_eq!(report.skr_symbol, 0.0);
        assert_eq!(report.skr_bps, 0.0);
    }

    #[test]
    fn skr_perfect_channel_asymptotic() {
        let mut params = nominal_params();
        params.beta = 1.0;
        params.eta = 1.0;
        params.v_el = 0.0;
        params.fer = 0.0;
        params.pe_fraction = 1e-9;
        params.n_block = usize::MAX / 2;
        let est = ChannelEstimate::exact(1.0, 0.0, 1.0, 1_000_000);
        let report = compute_skr(&est, &params, &ThroughputChain::default()).unwrap();
        // chi = 0 and Delta ~ 0: skr = I_AB = log2(5).
        assert!(report.chi_be.abs() < 1e-9);
        assert!((report.skr_symbol - libm::log2(5.0)).abs() < 1e-3);
    }

    #[test]
    fn skr_monotonicity_grid() {
        let base = ChannelEstimate::exact(0.444, 0.0048, 0.35, 500_000);
        let params = nominal_params();
        let chain = ThroughputChain::default();
        let skr0 = compute_skr(&base, &params, &chain).unwrap().skr_raw;

        // Non-increasing in xi.
        let mut prev = f64::INFINITY;
        for &xi in &[0.0, 0.002, 0.0048, 0.01, 0.02] {
            let e = ChannelEstimate::exact(0.444, xi, 0.35, 500_000);
            let r = compute_skr(&e, &params, &chain).unwrap().skr_raw;
            assert!(r <= prev + 1e-12, "xi={xi}");
            prev = r;
        }
        // Non-increasing in v_el.
        prev = f64::INFINITY;
        for &vel in &[0.0, 0.05, 0.1, 0.2] {
            let mut p = params.clone();
            p.v_el = vel;
            let r = compute_skr(&base, &p, &chain).unwrap().skr_raw;
            assert!(r <= prev + 1e-12, "vel={vel}");
            prev = r;
        }
        // Non-decreasing in beta.
        prev = f64::NEG_INFINITY;
        for &beta in &[0.8, 0.9, 0.95, 1.0] {
            let mut p = params.clone();
            p.beta = beta;
            let r = compute_skr(&base, &p, &chain).unwrap().skr_raw;
            assert!(r >= prev - 1e-12, "beta={beta}");
            prev = r;
        }
        // Non-decreasing in eta (estimate recomputed at matching eta).
        prev = f64::NEG_INFINITY;
        for &eta in &[0.2, 0.35, 0.6, 1.0] {
            let mut p = params.clone();
            p.eta = eta;
            let e = ChannelEstimate::exact(0.444, 0.0048, eta, 500_000);
            let r = compute_skr(&e, &p, &chain).unwrap().skr_raw;
            assert!(r >= prev - 1e-12, "eta={eta}");
            prev = r;
        }
        let _ = skr0;
    }

    #[test]
    fn degenerate_estimate_discards() {
        let mut est = ChannelEstimate::exact(0.444, 0.0048, 0.35, 1000);
        est.degenerate = true;
        let report = compute_skr(&est, &nominal_params(), &ThroughputChain::default()).unwrap();
        assert!(report.discarded);
        assert_eq!(report.skr_symbol, 0.0);
    }

    #[test]
    fn worst_case_mode_is_more_conservative() {
        let mut est = ChannelEstimate::exact(0.444, 0.0048, 0.35, 500_000);
        est.t_worst = 0.43;
        est.xi_worst = 0.02;
        let mut params = nominal_params();
        let point = compute_skr(&est, &params, &ThroughputChain::default()).unwrap();
        params.use_worst_case = true;
        let worst = compute_skr(&est, &params, &ThroughputChain::default()).unwrap();
        assert!(worst.chi_be > point.chi_be);
        assert!(worst.skr_raw < point.skr_raw);
    }
}
