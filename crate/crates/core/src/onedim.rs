//! The attractive delta-interacting Bose gas on the line: exact and Hartree
//! energies, the 1D Sobolev constant, the zero-momentum two-body principal
//! function and the mean-field bound solve.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{ensure, Error, Result};
use crate::quad::{integrate_to_infinity, Tolerance};
use crate::roots::{bisect_then_secant, golden_section_max, RootTolerance};

/// n bosons on ℝ with attractive coupling λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneDimProblem {
    pub n: u32,
    pub lambda: f64,
}

impl OneDimProblem {
    pub fn new(n: u32, lambda: f64) -> Result<Self> {
        let p = Self { n, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n < 2 {
            problems.push(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            problems.push(format!("lambda must be positive, got {}", self.lambda));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(problems.join("; ")))
        }
    }

    /// Inverse width b = λn/4 of the Hartree profile.
    pub fn b(&self) -> f64 {
        self.lambda * self.n as f64 / 4.0
    }

    pub fn exact(&self) -> f64 {
        exact_ground_energy(self.n, self.lambda)
    }

    pub fn hartree(&self) -> f64 {
        hartree_ground_energy(self.n, self.lambda)
    }
}

/// E = −λ²n(n²−1)/48.
pub fn exact_ground_energy(n: u32, lambda: f64) -> f64 {
    let n = n as f64;
    -lambda * lambda * n * (n * n - 1.0) / 48.0
}

/// E^H = −λ²n²(n−1)/48.
pub fn hartree_ground_energy(n: u32, lambda: f64) -> f64 {
    let n = n as f64;
    -lambda * lambda * n * n * (n - 1.0) / 48.0
}

/// √(b/2) sech(bx) with b = λn/4.
pub fn hartree_profile(n: u32, lambda: f64, x: f64) -> f64 {
    sech_profile(lambda * n as f64 / 4.0, x)
}

/// Unit-normalized √(b/2) sech(bx).
pub fn sech_profile(b: f64, x: f64) -> f64 {
    (b / 2.0).sqrt() / (b * x).cosh()
}

/// Closed-form integrals of the normalized sech profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SechIntegrals {
    pub norm: f64,
    /// ∫|u'|² = b²/3
    pub kinetic: f64,
    /// ∫|u|⁴ = b/3
    pub quartic: f64,
}

pub fn sech_integrals(b: f64) -> SechIntegrals {
    SechIntegrals { norm: 1.0, kinetic: b * b / 3.0, quartic: b / 3.0 }
}

/// S_{1,q} of the sharp 1D Gagliardo–Nirenberg inequality
/// K^θ N^{1−θ} ≥ S_{1,q} (∫|u|^q)^{2/q}, θ = (1 − 2/q)/2.
pub fn sobolev_1d(q: f64) -> Result<f64> {
    ensure(q > 2.0 && q.is_finite(), || format!("need 2 < q < infinity, got {q}"))?;
    let theta = 0.5 * (1.0 - 2.0 / q);
    let p = q / (q - 2.0);
    let ln_bracket = 0.5 * PI.ln() + ln_gamma(p) - ln_gamma(p + 0.5);
    let ln_s = q.ln() + theta * theta.ln() + (1.0 - theta) * (1.0 - theta).ln()
        - (2.0 / q) * 2f64.ln()
        - ((q - 2.0) / q) * (q - 2.0).ln()
        + ((q - 2.0) / q) * ln_bracket;
    Ok(ln_s.exp())
}

/// Both sides of the 1D Sobolev inequality for an even profile `u` with
/// derivative `du`, by quadrature over the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl SobolevCheck {
    pub fn margin(&self) -> f64 {
        self.lhs / self.rhs - 1.0
    }
}

pub fn sobolev_1d_check<U: Fn(f64) -> f64, D: Fn(f64) -> f64>(u: U, du: D, q: f64, scale: f64) -> Result<SobolevCheck> {
    let s = sobolev_1d(q)?;
    let tol = Tolerance::new(1e-15, 1e-13);
    let full = |g: &dyn Fn(f64) -> f64| -> Result<f64> { Ok(2.0 * integrate_to_infinity(g, 0.0, scale, tol)?.value) };
    let kinetic = full(&|x| du(x).powi(2))?;
    let norm = full(&|x| u(x).powi(2))?;
    let lq = full(&|x| u(x).abs().powf(q))?;
    let theta = 0.5 * (1.0 - 2.0 / q);
    Ok(SobolevCheck { lhs: kinetic.powf(theta) * norm.powf(1.0 - theta), rhs: s * lq.powf(2.0 / q) })
}

fn check_energy(lambda: f64, e: f64) -> Result<()> {
    ensure(lambda > 0.0 && lambda.is_finite(), || format!("lambda must be positive, got {lambda}"))?;
    ensure(e < 0.0 && e.is_finite(), || format!("E must be negative, got {e}"))
}

/// Zero-momentum two-body principal function Φ₀(E) = 1/λ − 1/√(8|E|).
pub fn two_body_phi_1d(lambda: f64, e: f64) -> Result<f64> {
    check_energy(lambda, e)?;
    Ok(1.0 / lambda - 1.0 / (8.0 * e.abs()).sqrt())
}

/// Φ₀(E) from the defining integral 1/λ − ∫₀^∞ e^{−t|E|}/√(8πt) dt, with
/// t = u² to remove the endpoint singularity.
pub fn two_body_phi_1d_quadrature(lambda: f64, e: f64) -> Result<f64> {
    check_energy(lambda, e)?;
    let a = e.abs();
    let tol = Tolerance::new(1e-16, 1e-13);
    let i = integrate_to_infinity(|u| (-a * u * u).exp(), 0.0, 1.0 / a.sqrt(), tol)?.value;
    Ok(1.0 / lambda - 2.0 * i / (8.0 * PI).sqrt())
}

/// Closed form and quadrature value of Φ₀(E); errors if they differ by more
/// than 1e-10.
pub fn two_body_phi_1d_verified(lambda: f64, e: f64) -> Result<(f64, f64)> {
    let closed = two_body_phi_1d(lambda, e)?;
    let quad = two_body_phi_1d_quadrature(lambda, e)?;
    let gap = (closed - quad).abs();
    if gap > 1e-10 * (1.0 / lambda).max(1.0) {
        return Err(Error::NoConvergence {
            what: "two-body principal function quadrature",
            iterations: 0,
            trace: vec![closed, quad],
        });
    }
    Ok((closed, quad))
}

/// Bound-state energy from the zero of Φ₀, searched in ln|E|.
pub fn two_body_energy_1d(lambda: f64) -> Result<f64> {
    ensure(lambda > 0.0 && lambda.is_finite(), || format!("lambda must be positive, got {lambda}"))?;
    let centre = (lambda * lambda / 8.0).ln();
    let w = 1e6f64.ln();
    let root = bisect_then_secant(
        |u| two_body_phi_1d(lambda, -u.exp()),
        centre - w,
        centre + w,
        RootTolerance::default(),
        "1D two-body energy",
    )?;
    Ok(-root.x.exp())
}

/// The mean-field chain: max over z = nK[u₀] of n^{3/2}√z / (2√3(|E|+z)),
/// equated to 1/λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanField1d {
    pub n: u32,
    pub lambda: f64,
    #[serde(rename = "E")]
    pub e: f64,
    /// Numerical maximizer z* at the returned energy.
    pub z_star: f64,
    /// Width parameter of the saturating profile, from K = z*/n = b²/3.
    pub b: f64,
    pub iterations: usize,
}

fn ratio_1d(n: f64, abs_e: f64, z: f64) -> f64 {
    n.powf(1.5) * z.sqrt() / (2.0 * 3f64.sqrt() * (abs_e + z))
}

/// Maximizer of the ratio at fixed |E|, searched over s = z/|E|.
fn maximize_1d(n: f64, abs_e: f64) -> (f64, f64) {
    let (s, v) = golden_section_max(|s| ratio_1d(n, abs_e, s * abs_e), 1e-8, 1e4, 1e-12);
    (s * abs_e, v)
}

pub fn meanfield_1d_solve(n: u32, lambda: f64) -> Result<MeanField1d> {
    OneDimProblem::new(n, lambda)?;
    ensure(n >= 3, || format!("the mean-field chain needs n >= 3, got {n}"))?;
    let nf = n as f64;
    let inv = 1.0 / lambda;
    // Start from the Hartree scale; the bracket is wide enough for any n.
    let centre = (lambda * lambda * nf.powi(3) / 48.0).ln();
    let w = 1e6f64.ln();
    let root = bisect_then_secant(
        |u| Ok(maximize_1d(nf, u.exp()).1 - inv),
        centre - w,
        centre + w,
        RootTolerance::default(),
        "1D mean-field energy",
    )?;
    let abs_e = root.x.exp();
    let (z_star, _) = maximize_1d(nf, abs_e);
    Ok(MeanField1d { n, lambda, e: -abs_e, z_star, b: (3.0 * z_star / nf).sqrt(), iterations: root.iterations })
}

/// One row of the exact / Hartree / mean-field comparison. Gaps are relative
/// to the exact energy; the mean-field entries are absent for n < 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: u32,
    pub exact: f64,
    pub hartree: f64,
    pub meanfield: Option<f64>,
    pub hartree_gap: f64,
    pub meanfield_gap: Option<f64>,
}

pub fn comparison_table(ns: &[u32], lambda: f64) -> Result<Vec<ComparisonRow>> {
    ns.iter()
        .map(|&n| {
            let p = OneDimProblem::new(n, lambda)?;
            let exact = p.exact();
            let hartree = p.hartree();
            let meanfield = if n >= 3 { Some(meanfield_1d_solve(n, lambda)?.e) } else { None };
            Ok(ComparisonRow {
                n,
                exact,
                hartree,
                meanfield,
                hartree_gap: (hartree - exact) / exact,
                meanfield_gap: meanfield.map(|m| (m - exact) / exact),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_integral<F: Fn(f64) -> f64>(f: F, scale: f64) -> f64 {
        2.0 * integrate_to_infinity(f, 0.0, scale, Tolerance::new(1e-16, 1e-13)).unwrap().value
    }

    #[test]
    fn closed_form_energies() {
        assert_eq!(exact_ground_energy(2, 1.0), -0.125);
        assert_eq!(exact_ground_energy(1, 3.0), 0.0);
        assert!((exact_ground_energy(3, 2.0) + 2.0).abs() < 1e-15);
        assert!((hartree_ground_energy(2, 1.0) + 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(hartree_ground_energy(1, 1.0), 0.0);
        let r = hartree_ground_energy(100, 1.0) / exact_ground_energy(100, 1.0);
        assert!((r - 100.0 * 99.0 / 9999.0).abs() < 1e-15);
        for n in [2u32, 5, 17, 1000] {
            let r = hartree_ground_energy(n, 0.7) / exact_ground_energy(n, 0.7);
            assert!((r - n as f64 / (n as f64 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn hartree_profile_integrals() {
        assert!((hartree_profile(4, 1.0, 0.0) - 0.5f64.sqrt()).abs() < 1e-16);
        for &b in &[0.5, 1.0, 4.0] {
            let u = |x: f64| sech_profile(b, x);
            let du = |x: f64| -b * sech_profile(b, x) * (b * x).tanh();
            let analytic = sech_integrals(b);
            let scale = 1.0 / b;
            assert!((line_integral(|x| u(x).powi(2), scale) - 1.0).abs() < 1e-10);
            assert!((line_integral(|x| du(x).powi(2), scale) / analytic.kinetic - 1.0).abs() < 1e-8);
            let quartic = line_integral(|x| u(x).powi(4), scale);
            assert!((quartic / analytic.quartic - 1.0).abs() < 1e-8);
            // saturated q = 4 inequality: ∫u⁴ = K^{1/2}/√3
            assert!((quartic - analytic.kinetic.sqrt() / 3f64.sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn sobolev_constant() {
        assert!((sobolev_1d(4.0).unwrap() - 3f64.powf(0.25)).abs() < 1e-12);
        assert!(sobolev_1d(2.0).is_err());
        assert!(sobolev_1d(1.0).is_err());
    }

    #[test]
    fn sobolev_saturation_and_strictness() {
        for &q in &[3.0, 4.0, 6.0] {
            let p = 2.0 / (q - 2.0);
            let b = 1.3;
            let u = |x: f64| (b * x).cosh().powf(-p);
            let du = |x: f64| -p * b * (b * x).tanh() * (b * x).cosh().powf(-p);
            let c = sobolev_1d_check(u, du, q, 1.0 / b).unwrap();
            assert!(c.margin().abs() < 1e-8, "q = {q}: {c:?}");
        }
        let g = sobolev_1d_check(|x| (-x * x).exp(), |x| -2.0 * x * (-x * x).exp(), 4.0, 1.0).unwrap();
        assert!(g.margin() > 1e-3, "{g:?}");
    }

    #[test]
    fn phi_examples() {
        assert!(two_body_phi_1d(1.0, -0.125).unwrap().abs() < 1e-15);
        let (c, q) = two_body_phi_1d_verified(1.0, -1.0).unwrap();
        assert!((c - (1.0 - 1.0 / 8f64.sqrt())).abs() < 1e-15);
        assert!((c - q).abs() < 1e-12);
        assert!((two_body_phi_1d(2.0, -1e30).unwrap() - 0.5).abs() < 1e-14);
        assert!(two_body_phi_1d(1.0, 0.5).is_err());
        assert!(two_body_phi_1d(-1.0, -0.5).is_err());
    }

    #[test]
    fn phi_zero_is_exact_two_body_energy() {
        for &l in &[0.5, 1.0, 2.0, 5.0] {
            let e = two_body_energy_1d(l).unwrap();
            let exact = exact_ground_energy(2, l);
            assert!((e / exact - 1.0).abs() < 1e-10, "{l}: {e} vs {exact}");
        }
    }

    #[test]
    fn phi_is_decreasing() {
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let e = -10f64.powf(3.0 - 6.0 * k as f64 / 199.0);
            let v = two_body_phi_1d(1.0, e).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn meanfield_leading_order() {
        let r = meanfield_1d_solve(100, 1.0).unwrap();
        assert!((r.e / (-1e6 / 48.0) - 1.0).abs() < 1e-9, "{r:?}");
        assert!((r.z_star / r.e.abs() - 1.0).abs() < 1e-6);
        assert!((r.b / 25.0 - 1.0).abs() < 1e-6);
        let ratio = r.e / hartree_ground_energy(100, 1.0);
        assert!((ratio - 100.0 / 99.0).abs() < 1e-9);
        let big = meanfield_1d_solve(1000, 1.0).unwrap();
        assert!((big.e / hartree_ground_energy(1000, 1.0) - 1.0).abs() < 1.1e-3);
        assert!(meanfield_1d_solve(2, 1.0).is_err());
    }

    #[test]
    fn table_rows() {
        let rows = comparison_table(&[2, 3, 10], 1.0).unwrap();
        assert_eq!(rows[0].exact, -0.125);
        assert!(rows[0].meanfield.is_none());
        for r in &rows[1..] {
            assert!(r.meanfield.unwrap() <= r.exact);
        }
        assert!(comparison_table(&[1], 1.0).is_err());
    }
}
