//! Round sphere of radius R: spectrum σ_l = l(l+1)/R², degeneracy 2l+1.

use std::f64::consts::PI;

use crate::quad::{integrate, Tolerance};

/// Below this value of τ = s/R² the heat trace is taken from its
/// short-time expansion instead of the spectral sum.
const ASYMPTOTIC_TAU: f64 = 1e-2;

/// Upper bound on Σ_{l>lmax} (2l+1) e^{-l(l+1)τ}.
///
/// Once the summand is decreasing the sum is dominated by
/// ∫_{lmax}^∞ (2x+1) e^{-x(x+1)τ} dx = e^{-lmax(lmax+1)τ}/τ; before that the
/// omitted terms are added explicitly.
pub fn trace_tail_bound(lmax: usize, tau: f64) -> f64 {
    let mut l = lmax;
    let mut explicit = 0.0;
    while ((2 * l + 1) as f64).powi(2) * tau < 2.0 {
        l += 1;
        explicit += (2 * l + 1) as f64 * (-((l * (l + 1)) as f64) * tau).exp();
    }
    explicit + (-((l * (l + 1)) as f64) * tau).exp() / tau
}

/// Smallest l such that the omitted tail is below `rel` times the partial sum.
fn truncation(tau: f64, rel: f64) -> usize {
    let mut lmax = 4usize;
    loop {
        let partial_floor: f64 = 1.0; // the l = 0 term
        if trace_tail_bound(lmax, tau) <= rel * partial_floor.max(1.0 / tau) || lmax > 5_000_000 {
            return lmax;
        }
        lmax = (lmax as f64 * 1.25).ceil() as usize + 1;
    }
}

/// Degree at which the spectral sums at τ = t/R² are truncated.
pub fn truncation_degree(tau: f64) -> usize {
    truncation(tau, 1e-17)
}

/// Θ(τ) by direct spectral summation, τ = s/R².
pub fn heat_trace_spectral(tau: f64) -> f64 {
    let lmax = truncation(tau, 1e-17);
    (0..=lmax)
        .rev()
        .map(|l| (2 * l + 1) as f64 * (-((l * (l + 1)) as f64) * tau).exp())
        .sum()
}

/// Coefficients of Θ(τ) = e^{τ/4} (1/τ + Σ_k c_k τ^{k-1}) from the midpoint
/// Euler–Maclaurin formula applied to Σ_l 2(l+½) e^{-(l+½)²τ}.
fn short_time_coefficients() -> [f64; 6] {
    // B_2 .. B_12
    let bernoulli = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let mut c = [0.0; 6];
    let mut factorial = 1.0;
    for k in 1..=6usize {
        if k > 1 {
            factorial *= (k - 1) as f64;
        }
        let kf = k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        c[k - 1] = (1.0 - 2f64.powf(1.0 - 2.0 * kf)) * bernoulli[k - 1] / (2.0 * kf) * 2.0 * sign / factorial;
    }
    c
}

/// Θ(τ) − 1/τ from the short-time expansion (accurate for τ < 1e-2).
fn trace_excess_asymptotic(tau: f64) -> f64 {
    let c = short_time_coefficients();
    let mut poly = 0.0;
    for &ck in c.iter().rev() {
        poly = poly * tau + ck;
    }
    let g = (0.25 * tau).exp();
    (0.25 * tau).exp_m1() / tau + g * poly
}

/// Heat trace Θ(s) on the sphere of radius `r`.
pub fn heat_trace(r: f64, s: f64) -> f64 {
    let tau = s / (r * r);
    if tau < ASYMPTOTIC_TAU {
        1.0 / tau + trace_excess_asymptotic(tau)
    } else {
        heat_trace_spectral(tau)
    }
}

/// Θ(s)/V − 1/(4πs).
pub fn diagonal_excess(r: f64, s: f64) -> f64 {
    let tau = s / (r * r);
    let v = 4.0 * PI * r * r;
    if tau < ASYMPTOTIC_TAU {
        trace_excess_asymptotic(tau) / v
    } else {
        heat_trace_spectral(tau) / v - 1.0 / (4.0 * PI * s)
    }
}

/// K_t at geodesic distance d: (1/4πR²) Σ (2l+1) P_l(cos(d/R)) e^{-l(l+1)t/R²}.
///
/// Truncated when the tail bound drops below 1e-17 of the diagonal sum, so the
/// absolute error is relative to the diagonal value K_t(x, x). Returns the
/// unclamped sum and the sum of |terms|.
fn legendre_sum(tau: f64, x: f64) -> (f64, f64) {
    let lmax = truncation(tau, 1e-17);
    let mut p_prev = 1.0;
    let mut p = x;
    let e1 = 3.0 * (-2.0 * tau).exp();
    let mut sum = 1.0 + e1 * x;
    let mut scale = 1.0 + e1;
    for l in 2..=lmax {
        let lf = l as f64;
        let p_next = ((2.0 * lf - 1.0) * x * p - (lf - 1.0) * p_prev) / lf;
        p_prev = p;
        p = p_next;
        let w = (2.0 * lf + 1.0) * (-lf * (lf + 1.0) * tau).exp();
        sum += w * p;
        scale += w;
    }
    (sum, scale)
}

/// The Legendre series alone, clamped at 0.
pub fn kernel_spectral(r: f64, t: f64, d: f64) -> f64 {
    let (sum, _) = legendre_sum(t / (r * r), (d / r).cos());
    (sum / (4.0 * PI * r * r)).max(0.0)
}

/// Σ_{l≥0} (2l+1) e^{-(l+½)²τ} sin((l+½)φ), summed in its Poisson-dual form
/// √(π/τ) Σ_k (−1)^k (φ+2πk)/(2τ) e^{-(φ+2πk)²/4τ}.
fn odd_theta_derivative(tau: f64, phi: f64) -> f64 {
    let term = |k: f64| {
        let y = phi + 2.0 * PI * k;
        y / (2.0 * tau) * (-y * y / (4.0 * tau)).exp()
    };
    // k and −k−1 carry opposite signs (−1)^k.
    let mut sum = term(0.0) - term(-1.0);
    let mut k = 1.0_f64;
    loop {
        let sign = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
        let pair = sign * (term(k) - term(-k - 1.0));
        sum += pair;
        if pair.abs() <= 1e-18 * sum.abs() || k > 50.0 {
            break;
        }
        k += 1.0;
    }
    (PI / tau).sqrt() * sum
}

/// Kernel from the Mehler–Dirichlet integral
/// P_l(cos θ) = (√2/π) ∫_θ^π sin((l+½)φ)/√(cos θ − cos φ) dφ,
/// which is a positive integrand for small τ and keeps relative accuracy far
/// from the diagonal. Uses φ = θ + (π−θ) sin²s to remove both endpoint
/// singularities.
pub fn kernel_integral(r: f64, t: f64, d: f64) -> f64 {
    let tau = t / (r * r);
    let theta = (d / r).clamp(0.0, PI);
    let delta = PI - theta;
    let prefactor = 2f64.sqrt() * (tau / 4.0).exp() / (4.0 * PI * PI * r * r);
    if delta < 1e-12 {
        // Antipode: ∫ dφ/√(cos θ − cos φ) → π/√2 as the interval closes.
        return (tau / 4.0).exp() * odd_theta_derivative(tau, PI) / (4.0 * PI * r * r);
    }
    let f = |s: f64| {
        let (sn, cs) = (s.sin(), s.cos());
        let gap = delta * sn * sn;
        let to_pole = delta * cs * cs;
        let phi = theta + gap;
        // cos θ − cos φ = 2 sin((φ+θ)/2) sin((φ−θ)/2), with (φ+θ)/2 = π − (to_pole + δ)/2.
        let denom = (2.0 * ((to_pole + delta) / 2.0).sin() * (gap / 2.0).sin()).sqrt();
        if denom == 0.0 {
            // Only reachable through underflow next to an endpoint, which the rule never samples.
            return 0.0;
        }
        odd_theta_derivative(tau, phi) * 2.0 * delta * sn * cs / denom
    };
    let tol = Tolerance::new(f64::MIN_POSITIVE, 1e-13);
    match integrate(f, 0.0, PI / 2.0, tol) {
        Ok(q) => (prefactor * q.value).max(0.0),
        Err(_) => kernel_spectral(r, t, d),
    }
}

/// K_t at geodesic distance d. The Legendre series is used unless it has
/// lost relative accuracy through cancellation, in which case the integral
/// representation takes over.
pub fn kernel(r: f64, t: f64, d: f64) -> f64 {
    let tau = t / (r * r);
    let (sum, scale) = legendre_sum(tau, (d / r).cos());
    if sum > 1e-8 * scale {
        sum / (4.0 * PI * r * r)
    } else {
        kernel_integral(r, t, d)
    }
}
