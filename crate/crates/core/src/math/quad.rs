//! Adaptive Simpson quadrature.

use crate::{Error, Result};
use alloc::format;

struct Ctx<'a> {
    f: &'a dyn Fn(f64) -> f64,
    rel_tol: f64,
    abs_floor: f64,
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    (fa + 4.0 * fm + fb) * h / 6.0
}

#[allow(clippy::too_many_arguments)]
fn adapt(ctx: &Ctx, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = (ctx.f)(lm);
    let frm = (ctx.f)(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = left + right - whole;
    let tol = ctx.rel_tol * (left + right).abs() + ctx.abs_floor;
    if depth == 0 || err.abs() <= 15.0 * tol {
        return left + right + err / 15.0;
    }
    adapt(ctx, a, m, fa, flm, fm, left, depth - 1) + adapt(ctx, m, b, fm, frm, fb, right, depth - 1)
}

/// Integrates `f` over `[a, b]` with adaptive Simpson refinement.
///
/// The interval is first cut into `init_panels` equal panels so that narrow
/// features are not missed, then each panel is refined to the requested
/// relative tolerance.
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    init_panels: usize,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(Error::InvalidArgument(format!(
            "bad integration interval [{a}, {b}]"
        )));
    }
    let n = init_panels.max(1);
    let ctx = Ctx {
        f,
        rel_tol,
        abs_floor: 1e-300,
    };
    let h = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let xm = 0.5 * (x0 + x1);
        let f0 = (ctx.f)(x0);
        let f1 = (ctx.f)(x1);
        let fm = (ctx.f)(xm);
        let whole = simpson(f0, fm, f1, h);
        total += adapt(&ctx, x0, x1, f0, fm, f1, whole, 48);
    }
    if !total.is_finite() {
        return Err(Error::Numerical(format!(
            "quadrature produced non-finite value over [{a}, {b}]"
        )));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(&|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 4).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_mass() {
        let v = integrate(
            &crate::math::special::normal_pdf,
            -10.0,
            10.0,
            1e-10,
            16,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn narrow_spike_found() {
        // Gaussian of width 1e-4 hidden in [0, 1].
        let f = |x: f64| libm::exp(-0.5 * ((x - 0.37) / 1e-4) * ((x - 0.37) / 1e-4));
        let v = integrate(&f, 0.0, 1.0, 1e-9, 256).unwrap();
        let exact = 1e-4 * libm::sqrt(2.0 * core::f64::consts::PI);
        assert!((v - exact).abs() / exact < 1e-6, "{v} vs {exact}");
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(integrate(&|x| x, 1.0, 0.0, 1e-6, 4).is_err());
    }
}
