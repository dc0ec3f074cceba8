//! Probabilistically shaped square-QAM constellations.

use crate::{Complex64, Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// A discrete modulation alphabet with point probabilities.
///
/// Points are coherent-state amplitudes (photon-number units): the mean photon
/// number is `sum p_k |alpha_k|^2 = va / 2`. The transmitted quadrature
/// displacement of a point is `2 * alpha`, so a symbol stream drawn from this
/// alphabet has per-quadrature variance `va`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    pub points: Vec<Complex64>,
    pub probs: Vec<f64>,
    /// Modulation variance in shot-noise units: `va = 2 sum p_k |alpha_k|^2`.
    pub va: f64,
    cdf: Vec<f64>,
}

impl Constellation {
    /// Builds a constellation from explicit points and probabilities.
    ///
    /// Probabilities are renormalized; the modulation variance is whatever
    /// the points imply (`va = 2 sum p |alpha|^2`).
    pub fn from_points(points: Vec<Complex64>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != probs.len() {
            return Err(Error::InvalidArgument(format!(
                "need matching non-empty points/probs, got {}/{}",
                points.len(),
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidArgument(
                "probabilities must be non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("probabilities sum to zero".into()));
        }
        let probs: Vec<f64> = probs.iter().map(|&p| p / total).collect();
        let va = 2.0
            * points
                .iter()
                .zip(&probs)
                .map(|(&a, &p)| p * a.norm_sqr())
                .sum::<f64>();
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Constellation {
            points,
            probs,
            va,
            cdf,
        })
    }

    /// Shannon entropy of the point distribution, bits.
    pub fn entropy_bits(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * libm::log2(p))
            .sum()
    }

    /// Mean point (complex); zero for any symmetric shaped grid.
    pub fn mean(&self) -> Complex64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(&a, &p)| a * p)
            .fold(Complex64::new(0.0, 0.0), |acc, x| acc + x)
    }

    /// Mean photon number `sum p |alpha|^2 = va / 2`.
    pub fn mean_photons(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(&a, &p)| p * a.norm_sqr())
            .sum()
    }

    /// Draws a point index from the cumulative distribution.
    pub fn sample_index(&self, u: f64) -> usize {
        // Binary search for the first cdf entry >= u.
        let mut lo = 0usize;
        let mut hi = self.cdf.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.cdf[mid] < u {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// Builds a Maxwell-Boltzmann-shaped square QAM constellation.
///
/// Probabilities follow `p_k proportional to exp(-nu |g_k|^2)` on the odd
/// integer grid `g = a + i b`, `a, b in {+-1, +-3, ...}`; amplitudes are then
/// scaled so the modulation variance equals `va_target`. `nu = 0` gives
/// uniform QAM.
pub fn build_constellation(order: u32, nu: f64, va_target: f64) -> Result<Constellation> {
    let side = match order {
        4 => 2,
        16 => 4,
        64 => 8,
        256 => 16,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unsupported QAM order {order} (expected 4, 16, 64 or 256)"
            )))
        }
    };
    if !(va_target > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "va_target must be > 0, got {va_target}"
        )));
    }
    if !(nu >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "shaping rate nu must be >= 0, got {nu}"
        )));
    }
    let levels: Vec<f64> = (0..side)
        .map(|k| (2 * k as i64 - (side as i64 - 1)) as f64)
        .collect();
    let mut points = Vec::with_capacity((side * side) as usize);
    let mut probs = Vec::with_capacity((side * side) as usize);
    let mut norm = 0.0;
    for &re in &levels {
        for &im in &levels {
            let e = re * re + im * im;
            let w = libm::exp(-nu * e);
            points.push(Complex64::new(re, im));
            probs.push(w);
            norm += w;
        }
    }
    for p in probs.iter_mut() {
        *p /= norm;
    }
    // Scale the grid so va = 2 sum p |alpha|^2 hits the target exactly.
    let raw_va: f64 = 2.0
        * points
            .iter()
            .zip(&probs)
            .map(|(&a, &p)| p * a.norm_sqr())
            .sum::<f64>();
    let scale = libm::sqrt(va_target / raw_va);
    for a in points.iter_mut() {
        *a *= scale;
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in &probs {
        acc += p;
        cdf.push(acc);
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    Ok(Constellation {
        points,
        probs,
        va: va_target,
        cdf,
    })
}

/// Finds the shaping rate that yields a target point entropy, by bisection.
///
/// Entropy is strictly decreasing in `nu`, from `log2(order)` at `nu = 0`.
pub fn shaping_nu_for_entropy(order: u32, target_bits: f64) -> Result<f64> {
    let max_bits = libm::log2(order as f64);
    if !(target_bits > 0.0 && target_bits < max_bits) {
        return Err(Error::InvalidArgument(format!(
            "target entropy {target_bits} outside (0, {max_bits})"
        )));
    }
    let entropy = |nu: f64| -> Result<f64> {
        Ok(build_constellation(order, nu, 1.0)?.entropy_bits())
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while entropy(hi)? > target_bits {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::Numerical(format!(
                "entropy target {target_bits} unreachable"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if entropy(mid)? > target_bits {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qpsk_uniform_points() {
        let c = build_constellation(4, 0.0, 2.0).unwrap();
        assert_eq!(c.points.len(), 4);
        for &p in &c.probs {
            assert!((p - 0.25).abs() < 1e-15);
        }
        // va = 2 -> |alpha| = 1, points (+-1 +- i)/sqrt(2).
        let inv_sqrt2 = 1.0 / libm::sqrt(2.0);
        for &a in &c.points {
            assert!((a.re.abs() - inv_sqrt2).abs() < 1e-12);
            assert!((a.im.abs() - inv_sqrt2).abs() < 1e-12);
            assert!((a.norm() - 1.0).abs() < 1e-12);
        }
        assert!((c.va - 2.0).abs() < 1e-12);
    }

    #[test]
    fn va_normalization_is_exact() {
        for &(order, nu, va) in &[(256u32, 0.03, 8.0), (64, 0.1, 4.0), (16, 0.0, 2.5)] {
            let c = build_constellation(order, nu, va).unwrap();
            let va_check = 2.0 * c.mean_photons();
            assert!(
                (va_check - va).abs() < 1e-9,
                "order {order}: va {va_check} vs {va}"
            );
        }
    }

    #[test]
    fn probabilities_sum_to_one_and_mean_is_zero() {
        let c = build_constellation(256, 0.05, 8.0).unwrap();
        let total: f64 = c.probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(c.mean().norm() < 1e-12);
    }

    #[test]
    fn entropy_decreases_with_shaping() {
        let mut prev = 8.0;
        for &nu in &[0.005, 0.02, 0.05, 0.1, 0.2] {
            let h = build_constellation(256, nu, 8.0).unwrap().entropy_bits();
            assert!(h < prev, "nu={nu}: entropy {h} not below {prev}");
            assert!(h < 8.0);
            prev = h;
        }
        let uniform = build_constellation(256, 0.0, 8.0).unwrap().entropy_bits();
        assert!((uniform - 8.0).abs() < 1e-12);
    }

    #[test]
    fn shaping_rate_hits_entropy_target() {
        let nu = shaping_nu_for_entropy(256, 6.0).unwrap();
        let h = build_constellation(256, nu, 8.0).unwrap().entropy_bits();
        assert!((h - 6.0).abs() < 1e-9, "entropy {h} at nu {nu}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_constellation(32, 0.0, 2.0).is_err());
        assert!(build_constellation(16, 0.0, 0.0).is_err());
        assert!(build_constellation(16, -0.1, 2.0).is_err());
    }

    #[test]
    fn sample_index_respects_distribution() {
        let c = build_constellation(16, 0.08, 4.0).unwrap();
        let mut rng = crate::math::rng::Rng::new(12);
        let n = 200_000;
        let mut counts = alloc::vec![0usize; c.points.len()];
        for _ in 0..n {
            counts[c.sample_index(rng.uniform())] += 1;
        }
        for (k, &cnt) in counts.iter().enumerate() {
            let emp = cnt as f64 / n as f64;
            assert!(
                (emp - c.probs[k]).abs() < 5e-3,
                "point {k}: {emp} vs {}",
                c.probs[k]
            );
        }
    }
}
