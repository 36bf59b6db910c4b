//! Heat kernels, heat traces and spectra of the model 2D geometries.

pub mod hyperbolic;
pub mod sphere;
pub mod spectrum;
pub mod torus;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::quad::{gauss_legendre_on, integrate, integrate_half_line, integrate_to_infinity, Tolerance};

pub use spectrum::{SpectralBasis, SpectralEntry};

/// One of the model geometries. Lengths are in natural units (ħ = 2m = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ManifoldSpec {
    Plane,
    /// Square flat torus of side `length`.
    Torus { length: f64 },
    /// Round sphere of radius `radius`.
    Sphere { radius: f64 },
    /// Hyperbolic plane of curvature radius `radius` (curvature −1/R²).
    Hyperbolic { radius: f64 },
    Line,
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldSpec::Plane => write!(f, "plane"),
            ManifoldSpec::Torus { length } => write!(f, "torus(L={length})"),
            ManifoldSpec::Sphere { radius } => write!(f, "sphere(R={radius})"),
            ManifoldSpec::Hyperbolic { radius } => write!(f, "hyperbolic(R={radius})"),
            ManifoldSpec::Line => write!(f, "line"),
        }
    }
}

/// K_t at geodesic separation `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelValue {
    pub value: f64,
    pub t: f64,
    pub d: f64,
}

fn check_time(name: &str, t: f64) -> Result<()> {
    ensure(t > 0.0 && t.is_finite(), || format!("{name} must be positive and finite, got {t}"))
}

impl ManifoldSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ManifoldSpec::Torus { length: x } | ManifoldSpec::Sphere { radius: x } | ManifoldSpec::Hyperbolic { radius: x } => {
                ensure(x > 0.0 && x.is_finite(), || format!("{self}: length parameter must be positive and finite"))
            }
            ManifoldSpec::Plane | ManifoldSpec::Line => Ok(()),
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, ManifoldSpec::Torus { .. } | ManifoldSpec::Sphere { .. })
    }

    /// Total volume; an error on non-compact variants.
    pub fn volume(&self) -> Result<f64> {
        self.validate()?;
        match *self {
            ManifoldSpec::Torus { length } => Ok(length * length),
            ManifoldSpec::Sphere { radius } => Ok(4.0 * PI * radius * radius),
            other => Err(Error::NonCompact(other.to_string())),
        }
    }

    /// Scalar curvature (twice the Gaussian curvature in 2D).
    pub fn scalar_curvature(&self) -> f64 {
        match *self {
            ManifoldSpec::Sphere { radius } => 2.0 / (radius * radius),
            ManifoldSpec::Hyperbolic { radius } => -2.0 / (radius * radius),
            _ => 0.0,
        }
    }

    /// K_t(x, y) with d(x, y) = `d`. On the torus `d` is the displacement (d, 0).
    pub fn heat_kernel(&self, t: f64, d: f64) -> Result<HeatKernelValue> {
        self.validate()?;
        check_time("t", t)?;
        ensure(d >= 0.0 && d.is_finite(), || format!("separation must be >= 0, got {d}"))?;
        let value = match *self {
            ManifoldSpec::Plane => (-d * d / (4.0 * t)).exp() / (4.0 * PI * t),
            ManifoldSpec::Torus { length } => torus::kernel(length, t, d, 0.0),
            ManifoldSpec::Sphere { radius } => sphere::kernel(radius, t, d),
            ManifoldSpec::Hyperbolic { radius } => hyperbolic::kernel(radius, t, d)?,
            ManifoldSpec::Line => {
                return Err(Error::UnsupportedManifold { op: "heat_kernel", manifold: self.to_string() })
            }
        };
        Ok(HeatKernelValue { value, t, d })
    }

    /// Θ(s) = Σ d_l e^{-σ_l s}.
    pub fn heat_trace(&self, s: f64) -> Result<f64> {
        self.validate()?;
        check_time("s", s)?;
        match *self {
            ManifoldSpec::Torus { length } => Ok(torus::heat_trace(length, s)),
            ManifoldSpec::Sphere { radius } => Ok(sphere::heat_trace(radius, s)),
            other => Err(Error::NonCompact(other.to_string())),
        }
    }

    /// Θ(s)/V − 1/(4πs), evaluated without cancellation at small s.
    /// Identically zero on the plane.
    pub fn diagonal_excess(&self, s: f64) -> Result<f64> {
        self.validate()?;
        check_time("s", s)?;
        match *self {
            ManifoldSpec::Plane => Ok(0.0),
            ManifoldSpec::Torus { length } => Ok(torus::diagonal_excess(length, s)),
            ManifoldSpec::Sphere { radius } => Ok(sphere::diagonal_excess(radius, s)),
            other => Err(Error::UnsupportedManifold { op: "diagonal_excess", manifold: other.to_string() }),
        }
    }
}

/// Richardson-extrapolated u_1 in 4πt K_t(x,x) = 1 + u_1 t + O(t²).
///
/// Works on (4πt K_t(x,x) − 1)/t = 4π·excess(t), halving t from V/(80π) and
/// extrapolating polynomially to t = 0.
pub fn short_time_u1(m: &ManifoldSpec) -> Result<f64> {
    let v = m.volume()?;
    let h0 = 0.05 * v / (4.0 * PI);
    let scale = 1.0 / v;
    let levels = 12;
    let mut table: Vec<Vec<f64>> = Vec::new();
    let mut diag = Vec::new();
    for i in 0..levels {
        let h = h0 / 2f64.powi(i as i32);
        let mut row = vec![4.0 * PI * m.diagonal_excess(h)?];
        for j in 1..=i {
            let factor = 2f64.powi(j as i32);
            let prev = &table[i - 1];
            row.push(row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0));
        }
        let best = row[i];
        diag.push(best);
        table.push(row);
        if i >= 3 {
            let change = (diag[i] - diag[i - 1]).abs();
            if change <= 1e-10 * best.abs().max(scale) {
                return Ok(best);
            }
        }
    }
    Err(Error::NoConvergence { what: "short-time u1 extrapolation", iterations: levels, trace: diag })
}

const SEMIGROUP_TOL: Tolerance = Tolerance::new(1e-15, 1e-12);

fn gaussian_1d(t: f64, u: f64) -> f64 {
    (-u * u / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// |∫ K_{t1}(x,z) K_{t2}(z,y) dz − K_{t1+t2}(x,y)| with d(x,y) = `d`.
///
/// Plane and torus integrals factorize over the two axes. The sphere integral
/// uses Gauss–Legendre in cos θ and the trapezoid rule in φ, both sized to
/// integrate the band-limited truncated kernels exactly.
pub fn semigroup_residual(m: &ManifoldSpec, t1: f64, t2: f64, d: f64) -> Result<f64> {
    m.validate()?;
    check_time("t1", t1)?;
    check_time("t2", t2)?;
    ensure(d >= 0.0 && d.is_finite(), || format!("separation must be >= 0, got {d}"))?;
    let lhs = match *m {
        ManifoldSpec::Plane => {
            let scale = (t1.max(t2)).sqrt();
            let along = integrate_half_line(|z| gaussian_1d(t1, z) * gaussian_1d(t2, z - d), d, scale, SEMIGROUP_TOL)?.value
                + integrate_half_line(|z| gaussian_1d(t1, -z) * gaussian_1d(t2, -z - d), scale, scale, SEMIGROUP_TOL)?.value;
            let across = 2.0 * integrate_half_line(|z| gaussian_1d(t1, z) * gaussian_1d(t2, z), 0.0, scale, SEMIGROUP_TOL)?.value;
            along * across
        }
        ManifoldSpec::Torus { length } => {
            let shift = d.rem_euclid(length);
            let k = |t: f64, x: f64| torus::circle_kernel(length, t, x);
            let along = integrate(|z| k(t1, z) * k(t2, z - d), 0.0, shift, SEMIGROUP_TOL)?.value
                + integrate(|z| k(t1, z) * k(t2, z - d), shift, length, SEMIGROUP_TOL)?.value;
            let across = integrate(|z| k(t1, z) * k(t2, z), 0.0, length, SEMIGROUP_TOL)?.value;
            along * across
        }
        ManifoldSpec::Sphere { radius } => {
            let r2 = radius * radius;
            let lmax = sphere::truncation_degree(t1.min(t2) / r2);
            let nodes = gauss_legendre_on(lmax + 8, -1.0, 1.0);
            let n_phi = 2 * lmax + 16;
            let theta_y = d / radius;
            let (cy, sy) = (theta_y.cos(), theta_y.sin());
            let mut total = 0.0;
            for &(x, w) in &nodes {
                let k1 = sphere::kernel_spectral(radius, t1, x.acos() * radius);
                let sx = (1.0 - x * x).max(0.0).sqrt();
                let mut ring = 0.0;
                for j in 0..n_phi {
                    let phi = 2.0 * PI * j as f64 / n_phi as f64;
                    let cos_gamma = (x * cy + sx * sy * phi.cos()).clamp(-1.0, 1.0);
                    ring += sphere::kernel_spectral(radius, t2, cos_gamma.acos() * radius);
                }
                total += w * k1 * ring * 2.0 * PI / n_phi as f64;
            }
            total * r2
        }
        other => return Err(Error::UnsupportedManifold { op: "semigroup_residual", manifold: other.to_string() }),
    };
    let rhs = m.heat_kernel(t1 + t2, d)?.value;
    Ok((lhs - rhs).abs())
}

/// |∫ K_t(x,y) dμ(y) − 1|.
pub fn stochastic_completeness_residual(m: &ManifoldSpec, t: f64) -> Result<f64> {
    m.validate()?;
    check_time("t", t)?;
    let tol = Tolerance::new(1e-15, 1e-12);
    let mass = match *m {
        ManifoldSpec::Plane => {
            integrate_to_infinity(|r| 2.0 * PI * r * (-r * r / (4.0 * t)).exp() / (4.0 * PI * t), 0.0, t.sqrt(), tol)?.value
        }
        ManifoldSpec::Torus { length } => {
            let line = integrate(|x| torus::circle_kernel(length, t, x), 0.0, length, tol)?.value;
            line * line
        }
        ManifoldSpec::Sphere { radius } => {
            let lmax = sphere::truncation_degree(t / (radius * radius));
            gauss_legendre_on(lmax / 2 + 8, -1.0, 1.0)
                .into_iter()
                .map(|(x, w)| w * sphere::kernel_spectral(radius, t, x.acos() * radius))
                .sum::<f64>()
                * 2.0
                * PI
                * radius
                * radius
        }
        ManifoldSpec::Hyperbolic { radius } => {
            let tau = t / (radius * radius);
            let f = |rho: f64| {
                let k = hyperbolic::kernel(radius, t, rho * radius).unwrap_or(f64::NAN);
                if k == 0.0 {
                    return 0.0;
                }
                2.0 * PI * radius * radius * k * rho.sinh()
            };
            let scale = tau.sqrt().max(tau);
            integrate_to_infinity(f, 0.0, scale, Tolerance::new(1e-14, 1e-10))?.value
        }
        other => return Err(Error::UnsupportedManifold { op: "stochastic_completeness_residual", manifold: other.to_string() }),
    };
    if !mass.is_finite() {
        return Err(Error::Quadrature { a: 0.0, b: f64::INFINITY, estimate: mass, error_estimate: f64::NAN, tolerance: 1e-10 });
    }
    Ok((mass - 1.0).abs())
}

/// K_t^{Torus(L)}(d) / K_t^{Plane}(d).
pub fn cheeger_yau_ratio(t: f64, d: f64, l: f64) -> Result<f64> {
    let torus = ManifoldSpec::Torus { length: l }.heat_kernel(t, d)?.value;
    let plane = ManifoldSpec::Plane.heat_kernel(t, d)?.value;
    Ok(torus / plane)
}

/// Lower bound of the torus kernel by the flat one (Ric = 0 comparison).
pub fn cheeger_yau_check(t: f64, d: f64, l: f64) -> Result<bool> {
    let torus = ManifoldSpec::Torus { length: l }.heat_kernel(t, d)?.value;
    let plane = ManifoldSpec::Plane.heat_kernel(t, d)?.value;
    Ok(torus >= plane)
}

/// Diagonal of the hyperbolic-plane kernel at time 2t.
pub fn mckean_h2_diagonal(r: f64, t: f64) -> Result<f64> {
    ManifoldSpec::Hyperbolic { radius: r }.validate()?;
    check_time("t", t)?;
    hyperbolic::mckean_diagonal(r, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_diagonal() {
        let k = ManifoldSpec::Plane.heat_kernel(0.25, 0.0).unwrap();
        assert!((k.value - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn sphere_zero_mode_limit() {
        let k = ManifoldSpec::Sphere { radius: 1.0 }.heat_kernel(60.0, 0.0).unwrap().value;
        assert!((k * 4.0 * PI - 1.0).abs() < 1e-15);
    }

    #[test]
    fn torus_trace_is_theta_squared() {
        // θ₃(0, e^{-1}) = 1.7726372048266521...
        let theta = 1.772_637_204_826_652_f64;
        let got = ManifoldSpec::Torus { length: 2.0 * PI }.heat_trace(1.0).unwrap();
        assert!((got / (theta * theta) - 1.0).abs() < 1e-14);
        assert!((got - 3.14224).abs() < 1e-5);
    }

    #[test]
    fn torus_kernel_at_half_is_dual_sum() {
        let l = 2.0 * PI;
        let direct = (-30i32..=30).map(|k| (-(k * k) as f64 / 2.0).exp()).sum::<f64>().powi(2) / (4.0 * PI * PI);
        let k = ManifoldSpec::Torus { length: l }.heat_kernel(0.5, 0.0).unwrap().value;
        assert!((k / direct - 1.0).abs() < 1e-13);
    }

    #[test]
    fn invalid_inputs() {
        assert!(ManifoldSpec::Plane.heat_kernel(0.0, 0.0).is_err());
        assert!(ManifoldSpec::Line.heat_kernel(1.0, 0.0).is_err());
        assert!(ManifoldSpec::Plane.heat_trace(1.0).is_err());
        assert!(ManifoldSpec::Hyperbolic { radius: 1.0 }.volume().is_err());
        assert!(ManifoldSpec::Torus { length: -1.0 }.validate().is_err());
    }

    #[test]
    fn u1_matches_curvature() {
        for r in [1.0, 2.0] {
            let m = ManifoldSpec::Sphere { radius: r };
            let u1 = short_time_u1(&m).unwrap();
            assert!((u1 / (m.scalar_curvature() / 6.0) - 1.0).abs() < 1e-6, "{u1}");
        }
        let u1 = short_time_u1(&ManifoldSpec::Torus { length: 3.0 }).unwrap();
        assert!(u1.abs() < 1e-12);
    }

    #[test]
    fn semigroup_examples() {
        assert!(semigroup_residual(&ManifoldSpec::Plane, 1.0, 1.0, 0.0).unwrap() < 1e-12);
        assert!(semigroup_residual(&ManifoldSpec::Sphere { radius: 1.0 }, 0.3, 0.7, PI / 2.0).unwrap() < 1e-10);
        assert!(semigroup_residual(&ManifoldSpec::Torus { length: 1.0 }, 0.1, 0.1, 0.0).unwrap() < 1e-10);
    }

    #[test]
    fn stochastic_completeness_examples() {
        assert!(stochastic_completeness_residual(&ManifoldSpec::Sphere { radius: 1.0 }, 0.5).unwrap() < 1e-12);
        assert!(stochastic_completeness_residual(&ManifoldSpec::Torus { length: 3.0 }, 2.0).unwrap() < 1e-12);
        assert!(stochastic_completeness_residual(&ManifoldSpec::Plane, 1.0).unwrap() < 1e-12);
        assert!(stochastic_completeness_residual(&ManifoldSpec::Hyperbolic { radius: 1.0 }, 0.5).unwrap() < 1e-8);
    }

    #[test]
    fn cheeger_yau_examples() {
        assert!(cheeger_yau_check(0.5, 0.0, 1.0).unwrap());
        let r = cheeger_yau_ratio(0.01, 0.2, 10.0).unwrap();
        assert!(r >= 1.0 && r - 1.0 < 1e-12);
        assert!(cheeger_yau_ratio(5.0, 0.0, 1.0).unwrap() > 50.0);
    }

    #[test]
    fn mckean_flat_limit_and_bound() {
        let t: f64 = 0.7;
        let r = 1e3 * t.sqrt();
        let v = mckean_h2_diagonal(r, t).unwrap();
        assert!((v * 8.0 * PI * t - 1.0).abs() < 1e-4);
        for &r in &[0.3, 1.0, 5.0] {
            for &t in &[0.01, 0.5, 3.0] {
                assert!(mckean_h2_diagonal(r, t).unwrap() <= 1.0 / (8.0 * PI * t));
            }
        }
    }
}
