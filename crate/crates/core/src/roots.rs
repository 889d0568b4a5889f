//! Bracketed root finding: Illinois-modified regula falsi with a bisection
//! safeguard.

use crate::error::{Error, Result};

/// Residual tolerance used by the steady-state solver.
pub const RESIDUAL_TOL: f64 = 1e-10;

const MAX_ITER: usize = 200;

/// Finds a root of `f` in `[a, b]` given `f(a)` and `f(b)` of opposite sign
/// (or one of them zero).
///
/// Stops when `|f(x)| <= residual_tol` or the bracket has shrunk to a few
/// ulps.
pub fn find_root<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, residual_tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::domain(format!(
            "root not bracketed on [{a}, {b}] (f = {fa:e}, {fb:e})"
        )));
    }
    // which end was retained on the previous step: -1 = a, 1 = b
    let mut side = 0i8;
    for _ in 0..MAX_ITER {
        let width = b - a;
        let mut x = (a * fb - b * fa) / (fb - fa);
        // fall back to bisection when the secant point is unusable or hugs an end
        if !x.is_finite() || x <= a + 0.01 * width || x >= b - 0.01 * width {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx.abs() <= residual_tol || width <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NoConvergence { what: "bracketed root finder", estimate: b - a })
}
