//! Nelder-Mead simplex minimization (derivative-free).

use alloc::vec::Vec;

/// Outcome of a Nelder-Mead run.
#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0` with initial simplex steps `step`.
///
/// Stops when the simplex function-value spread falls below `f_tol` or the
/// simplex collapses below `x_tol`, or after `max_iter` reflections.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    max_iter: usize,
    f_tol: f64,
    x_tol: f64,
) -> NmResult {
    let n = x0.len();
    assert_eq!(step.len(), n);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        // Order best .. worst.
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| fv[a].partial_cmp(&fv[b]).unwrap_or(core::cmp::Ordering::Equal));
        let best = idx[0];
        let worst = idx[n];
        let second_worst = idx[n - 1];

        let spread = (fv[worst] - fv[best]).abs();
        let size: f64 = (0..n)
            .map(|d| (simplex[worst][d] - simplex[best][d]).abs())
            .fold(0.0, f64::max);
        if spread <= f_tol && size <= x_tol {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = alloc::vec![0.0; n];
        for (i, v) in simplex.iter().enumerate() {
            if i == worst {
                continue;
            }
            for d in 0..n {
                centroid[d] += v[d] / n as f64;
            }
        }

        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            (0..n).map(|d| a[d] + t * (b[d] - a[d])).collect()
        };

        // Reflection.
        let xr = lerp(&centroid, &simplex[worst], -1.0);
        let fr = f(&xr);
        if fr < fv[best] {
            // Expansion.
            let xe = lerp(&centroid, &simplex[worst], -2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if fr < fv[second_worst] {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            // Contraction (outside if the reflected point improved on the worst).
            let (xc, fc) = if fr < fv[worst] {
                let x = lerp(&centroid, &simplex[worst], -0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = lerp(&centroid, &simplex[worst], 0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < fv[worst].min(fr) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                let best_v = simplex[best].clone();
                for (i, v) in simplex.iter_mut().enumerate() {
                    if i == best {
                        continue;
                    }
                    for d in 0..n {
                        v[d] = best_v[d] + 0.5 * (v[d] - best_v[d]);
                    }
                    fv[i] = f(v);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    NmResult {
        x: simplex[best].clone(),
        fx: fv[best],
        iterations,
        converged,
    }
}
