//! Adaptive Dormand–Prince 5(4) integrator for scalar ODEs.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeTolerance {
    pub abs: f64,
    pub rel: f64,
    /// Steps smaller than this fraction of the interval abort the integration.
    pub min_step_fraction: f64,
    pub max_steps: usize,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        Self {
            abs: 1e-15,
            rel: 1e-13,
            min_step_fraction: 1e-14,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSolution {
    pub y: f64,
    pub steps: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dy/dx = rhs(x, y)` from `(x0, y0)` to `x1` (either direction).
pub fn dormand_prince<F: Fn(f64, f64) -> f64>(rhs: F, x0: f64, y0: f64, x1: f64, tol: OdeTolerance) -> Result<OdeSolution> {
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(OdeSolution { y: y0, steps: 0, rejected: 0 });
    }
    let dir = span.signum();
    let min_step = tol.min_step_fraction * span.abs();
    let mut h = span.abs() / 64.0;
    let mut x = x0;
    let mut y = y0;
    let mut steps = 0;
    let mut rejected = 0;
    let mut trace = Vec::new();

    while (x1 - x) * dir > 0.0 {
        if steps + rejected >= tol.max_steps {
            return Err(Error::NoConvergence { what: "ODE integration", iterations: steps + rejected, trace });
        }
        h = h.min((x1 - x).abs());
        let mut k = [0.0; 7];
        for s in 0..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                yi += dir * h * A[s][j] * kj;
            }
            k[s] = rhs(x + dir * h * C[s], yi);
        }
        let y5 = y + dir * h * B5.iter().zip(&k).map(|(b, kk)| b * kk).sum::<f64>();
        let y4 = y + dir * h * B4.iter().zip(&k).map(|(b, kk)| b * kk).sum::<f64>();
        let scale = tol.abs + tol.rel * y.abs().max(y5.abs());
        let err = (y5 - y4).abs() / scale;
        if !y5.is_finite() {
            h *= 0.25;
            rejected += 1;
        } else if err <= 1.0 {
            x += dir * h;
            y = y5;
            steps += 1;
            if trace.len() < 8 {
                trace.push(y);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
        if h < min_step && (x1 - x).abs() > min_step {
            return Err(Error::NoConvergence { what: "ODE step size underflow", iterations: steps + rejected, trace });
        }
    }
    Ok(OdeSolution { y, steps, rejected })
}
