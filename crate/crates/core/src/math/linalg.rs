//! Dense linear algebra for small covariance matrices (row-major `Vec<f64>`).
//!
//! Sized for the 2- to 8-dimensional matrices that appear in Gaussian-state
//! entropy calculations; no attempt is made at large-matrix performance.

use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// `c = a * b` for square n x n matrices.
pub fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors stored as columns.
pub fn sym_eig(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().max(1e-300);
    let tol = 1e-30 * norm;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off <= tol {
            let eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
            return Ok((eig, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                // Apply rotation on rows/cols p and q.
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::Numerical(alloc::format!(
        "Jacobi eigensolver did not converge for {n}x{n} matrix"
    )))
}

/// Symmetric positive-semidefinite square root via eigen-decomposition.
pub fn sym_sqrt(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let (eig, v) = sym_eig(a, n)?;
    let mut r = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for (k, &lam) in eig.iter().enumerate() {
                let s = libm::sqrt(lam.max(0.0));
                acc += v[i * n + k] * s * v[j * n + k];
            }
            r[i * n + j] = acc;
        }
    }
    Ok(r)
}

/// Symplectic form Omega = diag([[0, 1], [-1, 0]], ...) for `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> Vec<f64> {
    let n = 2 * n_modes;
    let mut omega = vec![0.0; n * n];
    for m in 0..n_modes {
        omega[(2 * m) * n + 2 * m + 1] = 1.0;
        omega[(2 * m + 1) * n + 2 * m] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of a covariance matrix (xpxp ordering).
///
/// Computed numerically as the moduli of the eigenvalues of `i * Omega * gamma`:
/// with `S = gamma^(1/2)`, the matrix `K = S * Omega * S` is antisymmetric and
/// `-K^2` is symmetric with eigenvalues `nu^2`, each doubled.
pub fn symplectic_eigenvalues(gamma: &[f64], n_modes: usize) -> Result<Vec<f64>> {
    let n = 2 * n_modes;
    assert_eq!(gamma.len(), n * n);
    let s = sym_sqrt(gamma, n)?;
    let omega = symplectic_form(n_modes);
    let k = mat_mul(&mat_mul(&s, &omega, n), &s, n);
    // m = -k*k = k^T k (k antisymmetric), symmetric PSD.
    let mut m = mat_mul(&k, &k, n);
    for x in m.iter_mut() {
        *x = -*x;
    }
    // Symmetrize against roundoff.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = avg;
            m[j * n + i] = avg;
        }
    }
    let (mut eig, _) = sym_eig(&m, n)?;
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    // Eigenvalues come in degenerate pairs; take one of each.
    let mut nus = Vec::with_capacity(n_modes);
    for m_idx in 0..n_modes {
        let pair_avg = 0.5 * (eig[2 * m_idx] + eig[2 * m_idx + 1]);
        nus.push(libm::sqrt(pair_avg.max(0.0)));
    }
    Ok(nus)
}

/// Williamson normal form of a covariance matrix (xpxp ordering).
///
/// Returns `(nus, s)` with `gamma = s * diag(nu_1, nu_1, ...) * s^T` and `s`
/// symplectic. Construction: with `m = gamma^(1/2)` and `k = m Omega m`
/// (antisymmetric), an orthogonal `o` brings `k` to canonical blocks
/// `nu_j J_2`; then `s = m o diag(nu_j^(-1/2))`.
pub fn williamson(gamma: &[f64], n_modes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = 2 * n_modes;
    assert_eq!(gamma.len(), n * n);
    let m = sym_sqrt(gamma, n)?;
    let omega = symplectic_form(n_modes);
    let k = mat_mul(&mat_mul(&m, &omega, n), &m, n);
    // p = -k^2 symmetric PSD with doubly degenerate eigenvalues nu^2.
    let mut p = mat_mul(&k, &k, n);
    for x in p.iter_mut() {
        *x = -*x;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (p[i * n + j] + p[j * n + i]);
            p[i * n + j] = avg;
            p[j * n + i] = avg;
        }
    }
    let (eig, vecs) = sym_eig(&p, n)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig[b].partial_cmp(&eig[a]).unwrap_or(core::cmp::Ordering::Equal));
    // Build orthonormal pairs (v, u) with u an eigenvector of p and
    // v = k u / nu, orthogonalized against the pairs already chosen.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut nus = Vec::with_capacity(n_modes);
    let column = |mat: &[f64], j: usize| -> Vec<f64> { (0..n).map(|i| mat[i * n + j]).collect() };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    for &idx in &order {
        if basis.len() == n {
            break;
        }
        let nu2 = eig[idx].max(0.0);
        let nu = libm::sqrt(nu2);
        if nu < 1e-12 {
            return Err(Error::Numerical(alloc::string::String::from(
                "singular covariance matrix in Williamson decomposition",
            )));
        }
        let mut u = column(&vecs, idx);
        for b in &basis {
            let c = dot(&u, b);
            for (ui, bi) in u.iter_mut().zip(b) {
                *ui -= c * bi;
            }
        }
        let norm = libm::sqrt(dot(&u, &u));
        if norm < 1e-8 {
            continue; // already covered by an earlier pair
        }
        for ui in u.iter_mut() {
            *ui /= norm;
        }
        let mut v = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                v[i] += k[i * n + j] * u[j] / nu;
            }
        }
        nus.push(nu);
        basis.push(v);
        basis.push(u);
    }
    if basis.len() != n {
        return Err(Error::Numerical(alloc::string::String::from(
            "failed to assemble symplectic basis",
        )));
    }
    // o has the pair vectors as columns; s = m o diag(nu^-1/2).
    let mut s = vec![0.0; n * n];
    for (col, vecb) in basis.iter().enumerate() {
        let scale = 1.0 / libm::sqrt(nus[col / 2]);
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += m[i * n + j] * vecb[j];
            }
            s[i * n + col] = acc * scale;
        }
    }
    Ok((nus, s))
}

/// Conditions a Gaussian state on a heterodyne measurement of one mode.
///
/// `extra_noise` is added classical noise on the measurement outcome, in
/// covariance units (0 for an ideal heterodyne). Returns the conditional
/// covariance matrix of the remaining modes.
pub fn heterodyne_condition(
    gamma: &[f64],
    n_modes: usize,
    measured: usize,
    extra_noise: f64,
) -> Result<Vec<f64>> {
    let n = 2 * n_modes;
    assert_eq!(gamma.len(), n * n);
    assert!(measured < n_modes);
    let keep: Vec<usize> = (0..n).filter(|&i| i / 2 != measured).collect();
    let mi = 2 * measured;
    // gamma_m + (1 + extra) I, 2x2.
    let g00 = gamma[mi * n + mi] + 1.0 + extra_noise;
    let g01 = gamma[mi * n + mi + 1];
    let g10 = gamma[(mi + 1) * n + mi];
    let g11 = gamma[(mi + 1) * n + mi + 1] + 1.0 + extra_noise;
    let det = g00 * g11 - g01 * g10;
    if det.abs() < 1e-300 {
        return Err(Error::Numerical(alloc::string::String::from(
            "singular measured-mode covariance in heterodyne conditioning",
        )));
    }
    let inv = [g11 / det, -g01 / det, -g10 / det, g00 / det];
    let nr = keep.len();
    let mut out = vec![0.0; nr * nr];
    for (a, &ia) in keep.iter().enumerate() {
        let sa = [gamma[ia * n + mi], gamma[ia * n + mi + 1]];
        for (b, &ib) in keep.iter().enumerate() {
            let sb = [gamma[ib * n + mi], gamma[ib * n + mi + 1]];
            let corr = sa[0] * (inv[0] * sb[0] + inv[1] * sb[1])
                + sa[1] * (inv[2] * sb[0] + inv[3] * sb[1]);
            out[a * nr + b] = gamma[ia * n + ib] - corr;
        }
    }
    Ok(out)
}
