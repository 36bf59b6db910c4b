//! The renormalized principal operator in the two-body sector: its
//! eigenvalues ω_q(E), bound-state zeros, flow curves and derived bounds.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::manifolds::{torus, ManifoldSpec};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::renorm::RenormScheme;
use crate::roots::{bisect_then_secant, RootTolerance};

const OMEGA_TOL: Tolerance = Tolerance::new(1e-14, 1e-12);

/// Two-body mode: total lattice momentum q on the torus; (0, 0) is the
/// ground (constant) mode, the only one available on other manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mode(pub i64, pub i64);

impl Mode {
    pub const GROUND: Mode = Mode(0, 0);

    pub fn label(&self) -> String {
        format!("{}:{}", self.0, self.1)
    }
}

/// The first `count` torus modes, one representative per shell of |q|²
/// with q_1 ≥ q_2 ≥ 0: (0,0), (1,0), (1,1), (2,0), (2,1), ...
pub fn torus_modes(count: usize) -> Vec<Mode> {
    let mut out = Vec::new();
    let mut n2 = 0i64;
    while out.len() < count {
        let mut a = 0i64;
        while a * a <= n2 {
            let b2 = n2 - a * a;
            let b = (b2 as f64).sqrt().round() as i64;
            if b * b == b2 && a >= b {
                out.push(Mode(a, b));
                break;
            }
            a += 1;
        }
        n2 += 1;
    }
    out.truncate(count);
    out
}

fn check_energy(e: f64) -> Result<()> {
    ensure(e < 0.0 && e.is_finite(), || format!("energy must be negative and finite, got {e}"))
}

/// λ_q(t) − 1/(8πt): the part of the two-body kernel eigenvalue beyond the flat one.
fn mode_excess(m: &ManifoldSpec, mode: Mode, t: f64) -> Result<f64> {
    match *m {
        ManifoldSpec::Torus { length } => Ok(torus::mode_excess(length, (mode.0, mode.1), t)),
        ManifoldSpec::Plane | ManifoldSpec::Sphere { .. } if mode == Mode::GROUND => m.diagonal_excess(2.0 * t),
        ManifoldSpec::Plane | ManifoldSpec::Sphere { .. } => {
            Err(Error::InvalidInput(format!("mode {} is only defined on the torus, not on {m}", mode.label())))
        }
        other => Err(Error::UnsupportedManifold { op: "principal operator", manifold: other.to_string() }),
    }
}

/// Time scale at which curvature or finite size switches on.
fn geometric_time(m: &ManifoldSpec) -> f64 {
    match *m {
        ManifoldSpec::Torus { length } => length * length / (4.0 * PI),
        ManifoldSpec::Sphere { radius } => radius * radius,
        _ => 1.0,
    }
}

/// ∫₀^∞ w(t) · excess_q(t) e^{-|E|t} dt with weight w(t) = t^power.
fn excess_laplace(m: &ManifoldSpec, mode: Mode, abs_e: f64, power: i32) -> Result<f64> {
    mode_excess(m, mode, 1.0)?;
    if matches!(m, ManifoldSpec::Plane) {
        return Ok(0.0);
    }
    let f = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let g = mode_excess(m, mode, t).unwrap_or(f64::NAN);
        g * t.powi(power) * (-abs_e * t).exp()
    };
    let decay = 1.0 / abs_e;
    let split = geometric_time(m).min(decay);
    let head = integrate(f, 0.0, split, OMEGA_TOL)?;
    let tail = integrate_to_infinity(f, split, decay.max(split), OMEGA_TOL)?;
    let value = head.value + tail.value;
    if !value.is_finite() {
        return Err(Error::Quadrature { a: 0.0, b: f64::INFINITY, estimate: value, error_estimate: f64::NAN, tolerance: OMEGA_TOL.rel });
    }
    Ok(value)
}

/// ω_q(E) = (1/8π) ln(|E|/μ²) − ∫₀^∞ [λ_q(t) − 1/(8πt)] e^{-|E|t} dt.
///
/// The flat part of the integrand is integrated in closed form, so the
/// quadrature only sees a bounded, exponentially decaying remainder.
pub fn omega(m: &ManifoldSpec, scheme: &RenormScheme, e: f64, mode: Mode) -> Result<f64> {
    m.validate()?;
    scheme.validate()?;
    check_energy(e)?;
    let abs_e = -e;
    let flat = (abs_e.ln() - scheme.log_scale()) / (8.0 * PI);
    Ok(flat - excess_laplace(m, mode, abs_e, 0)?)
}

/// Ground-mode eigenvalue in the bound-state scheme.
pub fn omega0(m: &ManifoldSpec, mu2: f64, e: f64) -> Result<f64> {
    omega(m, &RenormScheme::BoundState { mu2 }, e, Mode::GROUND)
}

/// Torus eigenvalue of mode q in the bound-state scheme.
pub fn omega_mode(m: &ManifoldSpec, mu2: f64, e: f64, q: Mode) -> Result<f64> {
    ensure(matches!(m, ManifoldSpec::Torus { .. }), || format!("omega_mode needs a torus, got {m}"))?;
    omega(m, &RenormScheme::BoundState { mu2 }, e, q)
}

/// dω_q/dE = −∫₀^∞ t λ_q(t) e^{-|E|t} dt, differentiated under the integral.
pub fn domega_de(m: &ManifoldSpec, e: f64, mode: Mode) -> Result<f64> {
    m.validate()?;
    check_energy(e)?;
    let abs_e = -e;
    Ok(-1.0 / (8.0 * PI * abs_e) - excess_laplace(m, mode, abs_e, 1)?)
}

/// Numerical and integral forms of dω₀/dE at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub finite_difference: f64,
    pub integral: f64,
}

impl DerivativeCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.finite_difference / self.integral - 1.0).abs()
    }
}

/// Central finite difference of ω₀ (with one Richardson step) next to the
/// differentiated-under-the-integral value. Errors if the derivative is not negative.
pub fn domega_de_check(m: &ManifoldSpec, scheme: &RenormScheme, e: f64) -> Result<DerivativeCheck> {
    check_energy(e)?;
    let h = 1e-3 * e.abs();
    let central = |h: f64| -> Result<f64> {
        Ok((omega(m, scheme, e + h, Mode::GROUND)? - omega(m, scheme, e - h, Mode::GROUND)?) / (2.0 * h))
    };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let finite_difference = d2 + (d2 - d1) / 3.0;
    let integral = domega_de(m, e, Mode::GROUND)?;
    if !(finite_difference < 0.0 && integral < 0.0) {
        return Err(Error::NoConvergence { what: "negative derivative check", iterations: 2, trace: vec![d1, d2, integral] });
    }
    Ok(DerivativeCheck { finite_difference, integral })
}

/// A located zero of ω(E).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundStateResult {
    #[serde(rename = "E_gr")]
    pub e_gr: f64,
    /// More negative end of the final bracket, where ω > 0.
    pub bracket_lo: f64,
    /// Less negative end of the final bracket, where ω < 0.
    pub bracket_hi: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Energy window searched for zeros: |E| ∈ [μ²/factor, μ²·factor].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchWindow {
    pub factor: f64,
}

impl Default for SearchWindow {
    fn default() -> Self {
        Self { factor: 1e6 }
    }
}

/// Zero of ω_q(E), searched in u = ln|E| where ω is strictly increasing.
pub fn solve_mode(m: &ManifoldSpec, scheme: &RenormScheme, mode: Mode, window: SearchWindow) -> Result<BoundStateResult> {
    m.validate()?;
    scheme.validate()?;
    ensure(window.factor > 1.0, || format!("search window factor must exceed 1, got {}", window.factor))?;
    let centre = scheme.log_scale();
    let span = window.factor.ln();
    let f = |u: f64| omega(m, scheme, -u.exp(), mode);
    let tol = RootTolerance { x_abs: 1e-15, x_rel: 1e-15, ..RootTolerance::default() };
    let root = bisect_then_secant(f, centre - span, centre + span, tol, "principal eigenvalue omega(E)").map_err(|e| match e {
        Error::NoSignChange { what, lo, hi, f_lo, f_hi } => {
            Error::NoSignChange { what, lo: -hi.exp(), hi: -lo.exp(), f_lo: f_hi, f_hi: f_lo }
        }
        other => other,
    })?;
    Ok(BoundStateResult {
        e_gr: -root.x.exp(),
        bracket_lo: -root.hi.exp(),
        bracket_hi: -root.lo.exp(),
        residual: root.f.abs(),
        iterations: root.iterations,
    })
}

/// Two-body ground-state energy: the zero of ω₀(E).
pub fn solve_two_body(m: &ManifoldSpec, scheme: &RenormScheme) -> Result<BoundStateResult> {
    solve_mode(m, scheme, Mode::GROUND, SearchWindow::default())
}

/// One sample of a flow curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    #[serde(rename = "E")]
    pub e: f64,
    pub omega: f64,
    #[serde(rename = "domega_dE")]
    pub domega_de: f64,
}

/// ω_q(E) sampled on an energy grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalCurve {
    pub manifold: ManifoldSpec,
    pub scheme: RenormScheme,
    pub mode: Mode,
    pub samples: Vec<CurveSample>,
}

/// Derivative of tabulated values: second-order differences on the
/// (possibly non-uniform) interior, one-sided at the ends.
fn grid_derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n];
    if n < 2 {
        return d;
    }
    d[0] = (y[1] - y[0]) / (x[1] - x[0]);
    d[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    for i in 1..n - 1 {
        let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        d[i] = (-h1 / (h0 * (h0 + h1))) * y[i - 1] + ((h1 - h0) / (h0 * h1)) * y[i] + (h0 / (h1 * (h0 + h1))) * y[i + 1];
    }
    d
}

/// Flow curves ω_q(E) for each mode over a strictly increasing negative grid.
pub fn flow_curves(m: &ManifoldSpec, scheme: &RenormScheme, e_grid: &[f64], modes: &[Mode]) -> Result<Vec<PrincipalCurve>> {
    ensure(e_grid.len() >= 2, || "energy grid needs at least two points".to_string())?;
    ensure(e_grid.windows(2).all(|w| w[0] < w[1]), || "energy grid must be strictly increasing".to_string())?;
    ensure(e_grid.iter().all(|&e| e < 0.0), || "energy grid must be negative".to_string())?;
    modes
        .iter()
        .map(|&mode| {
            let omegas = e_grid.par_iter().map(|&e| omega(m, scheme, e, mode)).collect::<Result<Vec<f64>>>()?;
            let slopes = grid_derivative(e_grid, &omegas);
            let samples = e_grid
                .iter()
                .zip(omegas)
                .zip(slopes)
                .map(|((&e, omega), domega_de)| CurveSample { e, omega, domega_de })
                .collect();
            Ok(PrincipalCurve { manifold: *m, scheme: *scheme, mode, samples })
        })
        .collect()
}

/// n-body upper bound −(n−2)(n+1)/(2V|E₂|) at the two-body energy E₂.
pub fn nbody_bound_value(n: u32, volume: f64, e2: f64) -> Result<f64> {
    ensure(n >= 2, || format!("n must be at least 2, got {n}"))?;
    ensure(volume > 0.0, || format!("volume must be positive, got {volume}"))?;
    check_energy(e2)?;
    let n = n as f64;
    // (2 − n) rather than −(n − 2) so that n = 2 gives +0.
    Ok((2.0 - n) * (n + 1.0) / (2.0 * volume * e2.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NBodyBound {
    pub n: u32,
    pub volume: f64,
    pub e2: f64,
    pub bound: f64,
}

/// Upper bound on ω₀⁽ⁿ⁾(E₂) from the constant-profile variational state,
/// with E₂ solved on the compact manifold.
pub fn nbody_upper_bound(n: u32, m: &ManifoldSpec, scheme: &RenormScheme) -> Result<NBodyBound> {
    let volume = m.volume()?;
    let e2 = solve_two_body(m, scheme)?.e_gr;
    Ok(NBodyBound { n, volume, e2, bound: nbody_bound_value(n, volume, e2)? })
}

/// Which shift enters the hyperbolic two-body equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicShift {
    /// s = 1/(2R²), the shift carried by the e^{-t/2R²} factor.
    #[default]
    Curvature,
    /// s = R²/2, as printed in the source derivation.
    Printed,
}

impl HyperbolicShift {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            HyperbolicShift::Curvature => 1.0 / (2.0 * r * r),
            HyperbolicShift::Printed => 0.5 * r * r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicEstar {
    pub e_star: f64,
    /// y = |E_*| + s.
    pub y: f64,
    pub shift: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Solves (1/8π) ln(y/μ²) = −1/(2πy), y = |E_*| + s, for the branch y > 4
/// on which the left-minus-right side increases. A root exists iff μ² > 4e.
pub fn hyperbolic_estar(r: f64, mu2: f64, shift: HyperbolicShift) -> Result<HyperbolicEstar> {
    ManifoldSpec::Hyperbolic { radius: r }.validate()?;
    RenormScheme::BoundState { mu2 }.validate()?;
    let s = shift.value(r);
    let g = |y: f64| (y / mu2).ln() / (8.0 * PI) + 1.0 / (2.0 * PI * y);
    if mu2 <= 4.0 * std::f64::consts::E {
        return Err(Error::NoSignChange { what: "hyperbolic E_* equation (needs mu2 > 4e)", lo: 4.0, hi: mu2.max(4.0), f_lo: g(4.0), f_hi: g(mu2.max(4.0)) });
    }
    let tol = RootTolerance { bisection_width: 1e-3 * mu2, ..RootTolerance::default() };
    let root = bisect_then_secant(|y| Ok(g(y)), 4.0, mu2, tol, "hyperbolic E_* equation")?;
    let y = root.x;
    ensure(y > s, || format!("root y = {y} does not exceed the shift s = {s}; no E_* < 0"))?;
    Ok(HyperbolicEstar { e_star: -(y - s), y, shift: s, residual: root.f.abs(), iterations: root.iterations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceFit {
    /// (ε, I(ε)) pairs in input order.
    pub points: Vec<(f64, f64)>,
    /// Coefficient c of I(ε) ≈ c ln(1/ε) + b.
    pub slope: f64,
    pub intercept: f64,
}

/// I(ε) = ∫_ε^∞ e^{-|E|t} K_t(x,x) dt, computed in v = ln t where the
/// logarithmic growth becomes a flat integrand.
pub fn regularized_diagonal_integral(m: &ManifoldSpec, e: f64, eps: f64) -> Result<f64> {
    let v = m.volume()?;
    check_energy(e)?;
    ensure(eps > 0.0, || format!("cutoff must be positive, got {eps}"))?;
    let abs_e = -e;
    let t_max = 60.0 / abs_e;
    ensure(eps < t_max, || format!("cutoff {eps} beyond the decay time of e^(-|E|t)"))?;
    let f = |lnt: f64| {
        let t = lnt.exp();
        t * (-abs_e * t).exp() * m.heat_trace(t).unwrap_or(f64::NAN) / v
    };
    let body = integrate(f, eps.ln(), t_max.ln(), Tolerance::new(1e-14, 1e-12))?.value;
    let tail = integrate_to_infinity(|t| (-abs_e * t).exp() * m.heat_trace(t).unwrap_or(f64::NAN) / v, t_max, 1.0 / abs_e, Tolerance::new(1e-30, 1e-10))?.value;
    Ok(body + tail)
}

/// Least-squares fit of I(ε) against ln(1/ε).
pub fn divergence_demo(m: &ManifoldSpec, e: f64, eps_list: &[f64]) -> Result<DivergenceFit> {
    ensure(eps_list.len() >= 2, || "need at least two cutoffs".to_string())?;
    ensure(eps_list.iter().all(|&x| x > 0.0), || "cutoffs must be positive".to_string())?;
    let points = eps_list
        .par_iter()
        .map(|&eps| Ok((eps, regularized_diagonal_integral(m, e, eps)?)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = points.iter().map(|p| -p.0.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&points).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    ensure(sxx > 0.0, || "cutoffs must not all be equal".to_string())?;
    let slope = sxy / sxx;
    Ok(DivergenceFit { points, slope, intercept: my - slope * mx })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_closed_form() {
        assert!(omega0(&ManifoldSpec::Plane, 1.0, -1.0).unwrap().abs() < 1e-16);
        let v = omega0(&ManifoldSpec::Plane, 1.0, -std::f64::consts::E).unwrap();
        assert!((v - 1.0 / (8.0 * PI)).abs() < 1e-16);
        assert!(omega(&ManifoldSpec::Plane, &RenormScheme::BoundState { mu2: 1.0 }, -1.0, Mode(1, 0)).is_err());
    }

    #[test]
    fn torus_binds_more_strongly() {
        let m = ManifoldSpec::Torus { length: 1.0 };
        assert!(omega0(&m, 1.0, -1.0).unwrap() < 0.0);
        let r = solve_two_body(&m, &RenormScheme::BoundState { mu2: 1.0 }).unwrap();
        assert!(r.e_gr < -1.0 && r.residual < 1e-10);
        assert!(r.bracket_lo <= r.e_gr && r.e_gr <= r.bracket_hi);
    }

    #[test]
    fn ground_mode_equals_omega0() {
        let m = ManifoldSpec::Torus { length: 1.0 };
        for &e in &[-0.5, -1.0, -20.0] {
            let a = omega_mode(&m, 1.0, e, Mode::GROUND).unwrap();
            let b = omega0(&m, 1.0, e).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn excited_mode_decreasing() {
        let m = ManifoldSpec::Torus { length: 1.0 };
        let a = omega_mode(&m, 1.0, -1.0, Mode(1, 0)).unwrap();
        let b = omega_mode(&m, 1.0, -2.0, Mode(1, 0)).unwrap();
        assert!(b > a);
    }

    #[test]
    fn modes_listing() {
        assert_eq!(torus_modes(5), vec![Mode(0, 0), Mode(1, 0), Mode(1, 1), Mode(2, 0), Mode(2, 1)]);
    }

    #[test]
    fn grid_derivative_is_exact_for_quadratics() {
        let x = [0.0, 0.3, 1.0, 1.1, 2.5];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v * v - v).collect();
        let d = grid_derivative(&x, &y);
        for i in 1..4 {
            assert!((d[i] - (4.0 * x[i] - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_examples() {
        let c = domega_de_check(&ManifoldSpec::Plane, &RenormScheme::BoundState { mu2: 1.0 }, -1.0).unwrap();
        assert!((c.integral + 1.0 / (8.0 * PI)).abs() < 1e-16);
        assert!(c.relative_gap() < 1e-8);
        let s = domega_de_check(&ManifoldSpec::Sphere { radius: 1.0 }, &RenormScheme::BoundState { mu2: 1.0 }, -2.0).unwrap();
        assert!(s.integral < 0.0 && s.relative_gap() < 1e-6);
    }

    #[test]
    fn nbody_closed_form_examples() {
        assert_eq!(nbody_bound_value(2, 1.0, -1.0).unwrap(), 0.0);
        assert!((nbody_bound_value(3, 1.0, -1.0).unwrap() + 2.0).abs() < 1e-15);
        assert!((nbody_bound_value(10, 4.0 * PI, -1.0).unwrap() + 11.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_branch_and_existence() {
        let r = hyperbolic_estar(1e8, 100.0, HyperbolicShift::Curvature).unwrap();
        assert!((r.y - 95.915_421_543_8).abs() < 1e-6, "{}", r.y);
        assert!(hyperbolic_estar(1.0, 10.0, HyperbolicShift::Curvature).is_err());
        let p = hyperbolic_estar(2.0, 100.0, HyperbolicShift::Printed).unwrap();
        assert!((p.shift - 2.0).abs() < 1e-15);
    }
}
