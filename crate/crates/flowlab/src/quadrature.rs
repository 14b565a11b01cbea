//! Adaptive Simpson quadrature.
//!
//! Just the one rule this crate needs: recursive bisection with Richardson
//! correction, bounded depth and a hard evaluation budget. The tolerance is
//! mixed absolute/relative — pure absolute tolerances are unattainable for
//! the huge-magnitude escape integrals, pure relative ones for integrals
//! near zero. Callers integrate smooth, slowly varying integrands (the
//! singular ones are substituted away first), so the classic error
//! estimator is reliable here.

use crate::error::{FlowLabError, Result};

const MAX_DEPTH: usize = 60;
const MAX_EVALS: usize = 4_000_000;

/// Integrate `f` over `[a, b]`; the error target is
/// `tol * (1 + |integral|)` (mixed absolute/relative).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(FlowLabError::Parameter(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut evals = 3usize;
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut evals)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    evals: &mut usize,
) -> Result<f64> {
    *evals += 2;
    if *evals > MAX_EVALS {
        return Err(FlowLabError::QuadratureFailure { a, b, tol, depth: MAX_DEPTH - depth });
    }
    let m = 0.5 * (a + b);
    if m <= a.min(b) || m >= a.max(b) {
        // No representable midpoint left; the estimate cannot improve.
        return Ok(whole);
    }
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // The subdivision estimate bottoms out at the rounding noise of the
    // endpoint arithmetic, which scales with the coordinate magnitude and
    // the integrand size, not with the subinterval's own tolerance share.
    let f_scale = fa.abs().max(fm.abs()).max(fb.abs()).max(flm.abs()).max(frm.abs());
    let noise_floor = 8.0 * f64::EPSILON * (a.abs() + b.abs() + 1.0) * f_scale;
    if delta.abs() <= 15.0 * tol * (1.0 + (left + right).abs()) + noise_floor {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(FlowLabError::QuadratureFailure { a, b, tol, depth: MAX_DEPTH });
    }
    let half_tol = 0.5 * tol;
    let l = recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1, evals)?;
    let r = recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1, evals)?;
    Ok(l + r)
}
