//! In-place iterative radix-2 FFT for power-of-two lengths.

use crate::Complex64;
use alloc::vec::Vec;

/// Next power of two at or above `n`.
pub fn next_pow2(n: usize) -> usize {
    let mut p = 1;
    while p < n {
        p <<= 1;
    }
    p
}

/// Forward DFT, in place. `data.len()` must be a power of two.
pub fn fft(data: &mut [Complex64]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n <= 1 {
        return;
    }
    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -core::f64::consts::TAU / len as f64;
        let half = len / 2;
        // Per-stage twiddle table keeps the inner loop simple.
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| {
                let (s, c) = libm::sincos(ang * k as f64);
                Complex64::new(c, s)
            })
            .collect();
        let mut start = 0;
        while start < n {
            for k in 0..half {
                let u = data[start + k];
                let v = data[start + k + half] * twiddles[k];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
            start += len;
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn matches_direct_dft() {
        let n = 16;
        let mut rng = crate::math::rng::Rng::new(5);
        let x: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.normal(), rng.normal()))
            .collect();
        let mut y = x.clone();
        fft(&mut y);
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &xj) in x.iter().enumerate() {
                let ang = -core::f64::consts::TAU * (k * j) as f64 / n as f64;
                let (s, c) = libm::sincos(ang);
                acc += xj * Complex64::new(c, s);
            }
            assert!((acc - y[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn tone_lands_in_expected_bin() {
        let n = 1024;
        let bin = 37;
        let mut data: Vec<Complex64> = (0..n)
            .map(|j| {
                let ang = core::f64::consts::TAU * bin as f64 * j as f64 / n as f64;
                let (s, c) = libm::sincos(ang);
                Complex64::new(c, s)
            })
            .collect();
        fft(&mut data);
        let peak = (0..n)
            .max_by(|&a, &b| data[a].norm().partial_cmp(&data[b].norm()).unwrap())
            .unwrap();
        assert_eq!(peak, bin);
    }

    #[test]
    fn trivial_lengths() {
        let mut one = vec![Complex64::new(2.0, 0.0)];
        fft(&mut one);
        assert_eq!(one[0], Complex64::new(2.0, 0.0));
    }
}
