//! Hyperbolic plane of curvature −1/R², McKean's integral representation.

use std::f64::consts::{PI, SQRT_2};

use crate::error::Result;
use crate::quad::{integrate_to_infinity, Tolerance};

const TOL: Tolerance = Tolerance::new(0.0, 1e-12);

/// x / sinh(x) without overflow or cancellation.
fn x_over_sinh(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-4 {
        1.0 - ax * ax / 6.0
    } else if ax > 40.0 {
        2.0 * ax * (-ax).exp() / (1.0 - (-2.0 * ax).exp())
    } else {
        ax / ax.sinh()
    }
}

fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// Diagonal kernel at time 2t:
/// K_{2t}(x,x) = (R√2/(8πt)^{3/2}) e^{-t/2R²} ∫₀^∞ s e^{-s²R²/8t} / √(cosh s − 1) ds.
///
/// With √(cosh s − 1) = √2 sinh(s/2) and s = c u, c = √(8t)/R, the integral is
/// √2 c ∫₀^∞ e^{-u²} (cu/2)/sinh(cu/2) du, which has no endpoint singularity.
pub fn mckean_diagonal(r: f64, t: f64) -> Result<f64> {
    let c = (8.0 * t).sqrt() / r;
    let j = integrate_to_infinity(|u: f64| (-u * u).exp() * x_over_sinh(0.5 * c * u), 0.0, 1.0, TOL)?.value;
    let integral = SQRT_2 * c * j;
    Ok(r * SQRT_2 / (8.0 * PI * t).powf(1.5) * (-t / (2.0 * r * r)).exp() * integral)
}

/// K_t at geodesic distance d:
/// (√2 e^{-τ/4} / (R²(4πτ)^{3/2})) ∫_ρ^∞ s e^{-s²/4τ} / √(cosh s − cosh ρ) ds,
/// with τ = t/R², ρ = d/R.
///
/// The substitution s = ρ + w² removes the inverse square-root singularity;
/// e^{-ρ²/4τ} is factored out so large separations do not underflow early.
pub fn kernel(r: f64, t: f64, d: f64) -> Result<f64> {
    let tau = t / (r * r);
    let rho = d / r;
    if rho == 0.0 {
        return mckean_diagonal(r, 0.5 * t);
    }
    let integrand = |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        let w2 = w * w;
        let s = rho + w2;
        // cosh(ρ+w²) − cosh ρ = 2 sinh(ρ + w²/2) sinh(w²/2)
        let ln_denominator = 0.5 * (std::f64::consts::LN_2 + ln_sinh(rho + 0.5 * w2) + ln_sinh(0.5 * w2));
        let ln_val = s.ln() - w2 * (2.0 * rho + w2) / (4.0 * tau) + (2.0 * w).ln() - ln_denominator;
        ln_val.exp()
    };
    let w_scale = (2.0 * tau.sqrt()).min(2.0 * tau / rho).sqrt();
    let integral = integrate_to_infinity(integrand, 0.0, w_scale, TOL)?.value;
    let prefactor = SQRT_2 / (r * r * (4.0 * PI * tau).powf(1.5));
    Ok(prefactor * (-tau / 4.0 - rho * rho / (4.0 * tau)).exp() * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn off_diagonal_tends_to_diagonal() {
        for &(r, t) in &[(1.0, 0.5), (2.0, 3.0)] {
            let diag = kernel(r, t, 0.0).unwrap();
            let near = kernel(r, t, 1e-6 * r).unwrap();
            assert!((near / diag - 1.0).abs() < 1e-8, "{near} {diag}");
        }
    }

    #[test]
    fn diagonal_oracle_with_square_root_substitution() {
        // Independent route: s = √u turns the printed integral into
        // ∫₀^∞ e^{-uR²/8t} / (2√(cosh √u − 1)) du.
        let (r, t) = (1.0, 1.0);
        let f = |u: f64| {
            // cosh √u − 1 = Σ_{k≥1} u^k/(2k)!, summed as a series near the origin.
            let cosh_minus_one = if u < 1.0 {
                let mut term = 1.0;
                let mut sum = 0.0;
                for k in 1..30 {
                    term *= u / ((2 * k - 1) * (2 * k)) as f64;
                    sum += term;
                }
                sum
            } else {
                u.sqrt().cosh() - 1.0
            };
            let denom = cosh_minus_one.sqrt();
            if denom == 0.0 {
                0.0
            } else {
                (-u * r * r / (8.0 * t)).exp() / (2.0 * denom)
            }
        };
        let head = integrate(f, 0.0, 1.0, Tolerance::new(1e-14, 1e-13)).unwrap().value;
        let tail = integrate_to_infinity(f, 1.0, 8.0 * t, Tolerance::new(1e-14, 1e-13)).unwrap().value;
        let oracle = r * SQRT_2 / (8.0 * PI * t).powf(1.5) * (-t / (2.0 * r * r)).exp() * (head + tail);
        let v = mckean_diagonal(r, t).unwrap();
        assert!(v > 0.0);
        assert!((v / oracle - 1.0).abs() < 1e-8, "{v} vs {oracle}");
    }
}
