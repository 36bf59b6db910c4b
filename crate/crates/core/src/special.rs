//! Special functions: the exponential integral and lattice Gaussian sums.

use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral E₁(x) = ∫ₓ^∞ e⁻ᵗ/t dt for x > 0.
///
/// Power series below 1, modified-Lentz continued fraction above. Returns
/// `0.0` once the value underflows, and `+∞` at the origin.
pub fn expint_e1(x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x < 1.0 {
        // E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            let kf = k as f64;
            term *= -x / kf;
            let contrib = term / kf;
            sum += contrib;
            if contrib.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        if x > 745.0 {
            return 0.0;
        }
        // E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Σ_{k∈ℤ} exp(-a (k - c)²) for a > 0, summed directly.
///
/// Terms are added outward from the nearest lattice point until the Gaussian
/// tail bound falls below 1e-17 of the partial sum.
pub fn gaussian_lattice_sum_direct(a: f64, c: f64) -> f64 {
    let c = c - c.round();
    let mut sum = (-a * c * c).exp();
    let mut k = 1.0_f64;
    loop {
        let lo = (-a * (k + c) * (k + c)).exp();
        let hi = (-a * (k - c) * (k - c)).exp();
        sum += lo + hi;
        // Both tails are bounded by a geometric series in e^{-2a(k+1-|c|)}.
        let next = k + 1.0 - c.abs();
        let ratio = (-2.0 * a * next).exp();
        let tail = 2.0 * (-a * next * next).exp() / (1.0 - ratio).max(f64::MIN_POSITIVE);
        if tail <= 1e-17 * sum || k > 1e8 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Poisson dual of [`gaussian_lattice_sum_direct`]:
/// √(π/a) Σ_m exp(-π² m²/a) cos(2π m c).
pub fn gaussian_lattice_sum_dual(a: f64, c: f64) -> f64 {
    let b = PI * PI / a;
    let mut sum = 1.0;
    let mut m = 1.0_f64;
    loop {
        let term = (-b * m * m).exp();
        sum += 2.0 * term * (2.0 * PI * m * c).cos();
        let ratio = (-b * (2.0 * m + 1.0)).exp();
        let tail = 2.0 * (-b * (m + 1.0) * (m + 1.0)).exp() / (1.0 - ratio).max(f64::MIN_POSITIVE);
        if tail <= 1e-17 * sum.abs().max(1e-300) || m > 1e8 {
            break;
        }
        m += 1.0;
    }
    (PI / a).sqrt() * sum
}

/// Σ_{k∈ℤ} exp(-a (k - c)²), using whichever representation converges faster.
pub fn gaussian_lattice_sum(a: f64, c: f64) -> f64 {
    if a >= PI {
        gaussian_lattice_sum_direct(a, c)
    } else {
        gaussian_lattice_sum_dual(a, c)
    }
}

/// Legendre polynomials P_0..=P_n at x by the three-term recurrence.
pub fn legendre_table(n: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n >= 1 {
        p.push(x);
    }
    for l in 2..=n {
        let lf = l as f64;
        let next = ((2.0 * lf - 1.0) * x * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf;
        p.push(next);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_to_infinity, Tolerance};

    #[test]
    fn e1_reference_values() {
        // Abramowitz & Stegun table 5.1
        assert!((expint_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((expint_e1(0.5) - 0.559_773_594_776_160_8).abs() < 1e-15);
        assert!((expint_e1(10.0) / 4.156_968_929_685_324e-6 - 1.0).abs() < 1e-13);
        assert_eq!(expint_e1(800.0), 0.0);
        assert_eq!(expint_e1(0.0), f64::INFINITY);
    }

    #[test]
    fn e1_matches_quadrature_across_the_branch_point() {
        for &x in &[1e-6, 0.01, 0.3, 0.999, 1.0, 1.001, 2.5, 7.0, 30.0] {
            let q = integrate_to_infinity(|t: f64| (-t).exp() / t, x, 1.0, Tolerance::new(1e-300, 1e-13)).unwrap();
            let e = expint_e1(x);
            assert!((e / q.value - 1.0).abs() < 1e-12, "x={x}: {e} vs {}", q.value);
        }
    }

    #[test]
    fn lattice_sum_representations_agree() {
        for &a in &[0.05, 0.5, 1.0, PI, 5.0, 20.0] {
            for &c in &[0.0, 0.25, 0.5, -0.3] {
                let d = gaussian_lattice_sum_direct(a, c);
                let p = gaussian_lattice_sum_dual(a, c);
                assert!((d / p - 1.0).abs() < 1e-13, "a={a} c={c}: {d} vs {p}");
            }
        }
    }

    #[test]
    fn theta_three_at_e_inverse() {
        // θ₃(0, e^{-1}) = Σ e^{-k²}
        let t = gaussian_lattice_sum(1.0, 0.0);
        assert!((t - 1.772_637_204_826_652).abs() < 1e-14);
    }

    #[test]
    fn legendre_known_values() {
        let p = legendre_table(4, 0.5);
        assert!((p[2] - (-0.125)).abs() < 1e-15);
        assert!((p[3] - (-0.4375)).abs() < 1e-15);
        assert!((p[4] - (-0.289_062_5)).abs() < 1e-15);
        assert!(legendre_table(50, 1.0).iter().all(|v| (v - 1.0).abs() < 1e-13));
    }
}
