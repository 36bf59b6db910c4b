//! Bracketing root finding and one-dimensional maximization.

use crate::error::{Error, Result};

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub f: f64,
    /// Final bracket, ordered `lo < hi`.
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub iterations: usize,
}

/// Stopping rule for [`bisect_then_secant`].
#[derive(Debug, Clone, Copy)]
pub struct RootTolerance {
    /// Width (in x) at which bisection hands over to the secant polish.
    pub bisection_width: f64,
    /// Absolute bracket width at which the search stops.
    pub x_abs: f64,
    /// Relative bracket width at which the search stops.
    pub x_rel: f64,
    /// Residual at which the search stops even if the bracket is wider.
    pub f_abs: f64,
    pub max_iterations: usize,
}

impl Default for RootTolerance {
    fn default() -> Self {
        Self {
            bisection_width: 1e-2,
            x_abs: 0.0,
            x_rel: 4.0 * f64::EPSILON,
            f_abs: 0.0,
            max_iterations: 400,
        }
    }
}

/// Root of `f` on `[lo, hi]` given a sign change: bisection until the bracket
/// is narrower than `tol.bisection_width`, then Illinois-modified secant steps
/// that never leave the bracket.
pub fn bisect_then_secant<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: RootTolerance,
    what: &'static str,
) -> Result<Root> {
    let (mut a, mut b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(Root { x: a, f: 0.0, lo: a, hi: b, f_lo: fa, f_hi: fb, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, f: 0.0, lo: a, hi: b, f_lo: fa, f_hi: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { what, lo: a, hi: b, f_lo: fa, f_hi: fb });
    }

    let mut iterations = 0;
    let converged = |a: f64, b: f64| (b - a).abs() <= tol.x_abs + tol.x_rel * a.abs().max(b.abs()).max(1e-300);

    while (b - a) > tol.bisection_width && iterations < tol.max_iterations {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        iterations += 1;
        if fm == 0.0 {
            return Ok(Root { x: m, f: 0.0, lo: a, hi: b, f_lo: fa, f_hi: fb, iterations });
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
        if converged(a, b) {
            break;
        }
    }

    // Illinois: halve the stale endpoint's value when the same side is kept twice.
    let mut side = 0i8;
    let mut trace = Vec::new();
    let mut width_checkpoint = b - a;
    let mut secant_steps = 0;
    while !converged(a, b) && iterations < tol.max_iterations {
        // Fall back to bisection when three secant steps fail to halve the bracket.
        secant_steps += 1;
        let force_bisection = secant_steps % 4 == 0 && (b - a) > 0.5 * width_checkpoint;
        if secant_steps % 4 == 0 {
            width_checkpoint = b - a;
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        if force_bisection || !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x)?;
        iterations += 1;
        trace.push(x);
        if fx == 0.0 || fx.abs() < tol.f_abs {
            return Ok(Root { x, f: fx, lo: a, hi: b, f_lo: fa, f_hi: fb, iterations });
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
    if !converged(a, b) {
        trace.truncate(8);
        return Err(Error::NoConvergence { what, iterations, trace });
    }
    // The halved endpoint values are not true residuals; re-evaluate.
    let fa_true = f(a)?;
    let fb_true = f(b)?;
    let (x, fx) = if fa_true.abs() <= fb_true.abs() { (a, fa_true) } else { (b, fb_true) };
    Ok(Root { x, f: fx, lo: a, hi: b, f_lo: fa_true, f_hi: fb_true, iterations })
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
/// Returns `(x_max, f(x_max))`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, x_tol: f64) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= x_tol * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
