//! Square flat torus of side L.
//!
//! Every quantity factorizes over the two axes, so everything here is built
//! from the one-dimensional periodic kernel. Its image form converges fast
//! for t ≲ L²/(4π) and its Fourier form for larger t.

use std::f64::consts::PI;

use crate::special::{gaussian_lattice_sum_direct, gaussian_lattice_sum_dual};

/// Image-sum parameter above which the image series is used.
const IMAGE_THRESHOLD: f64 = PI;

/// Periodic heat kernel on a circle of length `l`, image representation.
pub fn circle_kernel_image(l: f64, t: f64, x: f64) -> f64 {
    let a = l * l / (4.0 * t);
    gaussian_lattice_sum_direct(a, -x / l) / (4.0 * PI * t).sqrt()
}

/// Periodic heat kernel on a circle of length `l`, Fourier representation.
pub fn circle_kernel_spectral(l: f64, t: f64, x: f64) -> f64 {
    // (1/l) Σ_n e^{-4π²n²t/l²} cos(2πnx/l) is the Poisson dual of the image sum.
    let a = l * l / (4.0 * t);
    gaussian_lattice_sum_dual(a, -x / l) / (4.0 * PI * t).sqrt()
}

pub fn circle_kernel(l: f64, t: f64, x: f64) -> f64 {
    if l * l / (4.0 * t) >= IMAGE_THRESHOLD {
        circle_kernel_image(l, t, x)
    } else {
        circle_kernel_spectral(l, t, x)
    }
}

/// K_t on the torus for displacement (dx, dy).
pub fn kernel(l: f64, t: f64, dx: f64, dy: f64) -> f64 {
    if l * l / (4.0 * t) >= IMAGE_THRESHOLD {
        kernel_image(l, t, dx, dy)
    } else {
        kernel_spectral(l, t, dx, dy)
    }
}

/// Σ_{k≠0} e^{-(x+kl)²/4t}.
fn other_images(l: f64, t: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut k = 1.0_f64;
    loop {
        let lo = (-(x - k * l).powi(2) / (4.0 * t)).exp();
        let hi = (-(x + k * l).powi(2) / (4.0 * t)).exp();
        sum += lo + hi;
        if k * l > x.abs() + l && lo.max(hi) <= 1e-18 * sum || k > 1e8 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Image sum written as the plane kernel at (dx, dy) plus the non-negative
/// contribution of all other images, so that it never rounds below the plane.
pub fn kernel_image(l: f64, t: f64, dx: f64, dy: f64) -> f64 {
    let norm = 4.0 * PI * t;
    let direct = (-(dx * dx + dy * dy) / (4.0 * t)).exp() / norm;
    let (gx, gy) = ((-dx * dx / (4.0 * t)).exp(), (-dy * dy / (4.0 * t)).exp());
    let (rx, ry) = (other_images(l, t, dx), other_images(l, t, dy));
    direct + (rx * (gy + ry) + gx * ry) / norm
}

pub fn kernel_spectral(l: f64, t: f64, dx: f64, dy: f64) -> f64 {
    circle_kernel_spectral(l, t, dx) * circle_kernel_spectral(l, t, dy)
}

/// Σ_{m≥1} 2 s^m e^{-a m²} with s = ±1: the image corrections to a
/// one-dimensional theta sum, computed without forming 1 + (small).
fn image_corrections(a: f64, alternating: bool) -> f64 {
    let mut sum = 0.0;
    let mut m = 1.0_f64;
    loop {
        let term = 2.0 * (-a * m * m).exp();
        let signed = if alternating && (m as i64) % 2 == 1 { -term } else { term };
        sum += signed;
        if term <= 1e-18 * (1.0 + sum.abs()) || term == 0.0 {
            break;
        }
        m += 1.0;
    }
    sum
}

/// Heat trace Θ(s) = (Σ_n e^{-4π²n²s/L²})².
pub fn heat_trace(l: f64, s: f64) -> f64 {
    let a = l * l / (4.0 * s);
    let theta = if a >= IMAGE_THRESHOLD {
        l * circle_kernel_image(l, s, 0.0)
    } else {
        1.0 + image_corrections(PI * PI / a, false)
    };
    theta * theta
}

/// Θ(s)/V − 1/(4πs): the diagonal kernel minus its flat (Weyl) part.
pub fn diagonal_excess(l: f64, s: f64) -> f64 {
    let a = l * l / (4.0 * s);
    if a >= IMAGE_THRESHOLD {
        let e = image_corrections(a, false);
        (2.0 * e + e * e) / (4.0 * PI * s)
    } else {
        heat_trace(l, s) / (l * l) - 1.0 / (4.0 * PI * s)
    }
}

/// σ_q = 4π²|q|²/L² for an integer lattice vector.
pub fn mode_eigenvalue(l: f64, q: (i64, i64)) -> f64 {
    let n2 = (q.0 * q.0 + q.1 * q.1) as f64;
    4.0 * PI * PI * n2 / (l * l)
}

/// Two-body kernel eigenvalue of mode q,
/// λ_q(t) = (1/V) Σ_k e^{-t(σ_k + σ_{q-k})}, returned as λ_q(t) − 1/(8πt).
///
/// Per axis Σ_k e^{-t(σ_k+σ_{q_i-k})} = e^{-tσ_{q_i}/2} Σ_k e^{-(8π²t/L²)(k - q_i/2)²};
/// for odd q_i the Poisson dual of the half-shifted sum alternates in sign.
pub fn mode_excess(l: f64, q: (i64, i64), t: f64) -> f64 {
    let a_image = l * l / (8.0 * t);
    let half_sigma = 0.5 * mode_eigenvalue(l, q);
    if a_image >= IMAGE_THRESHOLD {
        let e1 = image_corrections(a_image, q.0 % 2 != 0);
        let e2 = image_corrections(a_image, q.1 % 2 != 0);
        let p_minus_one = e1 + e2 + e1 * e2;
        let decay = (-t * half_sigma).exp_m1();
        (decay * (1.0 + p_minus_one) + p_minus_one) / (8.0 * PI * t)
    } else {
        let b = 8.0 * PI * PI * t / (l * l);
        let axis = |qi: i64| gaussian_lattice_sum_direct(b, 0.5 * qi as f64);
        let lambda = (-t * half_sigma).exp() * axis(q.0) * axis(q.1) / (l * l);
        lambda - 1.0 / (8.0 * PI * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_and_spectral_agree() {
        for &l in &[1.0, 2.0 * PI, 3.0] {
            for &tf in &[0.01, 0.05, 0.1, 0.3, 1.0] {
                let t = tf * l * l;
                for &x in &[0.0, 0.1 * l, 0.37 * l, 0.5 * l] {
                    let a = circle_kernel_image(l, t, x);
                    let b = circle_kernel_spectral(l, t, x);
                    assert!((a / b - 1.0).abs() < 1e-12, "l={l} t={t} x={x}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn excess_is_continuous_across_representations() {
        let l = 1.3;
        let s_cross = l * l / (4.0 * IMAGE_THRESHOLD);
        let lo = diagonal_excess(l, s_cross * (1.0 - 1e-12));
        let hi = diagonal_excess(l, s_cross * (1.0 + 1e-12));
        assert!((lo / hi - 1.0).abs() < 1e-9, "{lo} {hi}");
        // q = 0 mode at time t is the diagonal excess at time 2t.
        for &t in &[1e-3, 0.02, 0.5, 4.0] {
            let m = mode_excess(l, (0, 0), t);
            let d = diagonal_excess(l, 2.0 * t);
            assert!((m - d).abs() <= 1e-12 * d.abs().max(1e-300) + 1e-300, "t={t}: {m} {d}");
        }
    }

    #[test]
    fn mode_excess_matches_direct_lattice_double_sum() {
        let l = 1.0;
        for &q in &[(1, 0), (1, 1), (2, 1)] {
            for &t in &[0.005, 0.02, 0.1] {
                let mut s = 0.0;
                for k1 in -60i64..=60 {
                    for k2 in -60i64..=60 {
                        let sk = mode_eigenvalue(l, (k1, k2));
                        let sqk = mode_eigenvalue(l, (q.0 - k1, q.1 - k2));
                        s += (-t * (sk + sqk)).exp();
                    }
                }
                let direct = s / (l * l) - 1.0 / (8.0 * PI * t);
                let fast = mode_excess(l, q, t);
                assert!((direct - fast).abs() < 1e-10 * (1.0 / (8.0 * PI * t)), "q={q:?} t={t}: {direct} {fast}");
            }
        }
    }
}
