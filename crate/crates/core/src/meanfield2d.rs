//! Mean-field bound chain in two dimensions: Sobolev constants, the ratio
//! maximization, the log-space bound solver and the mean-field residual for
//! sampled profiles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{ensure, Error, Result};
use crate::manifolds::ManifoldSpec;
use crate::roots::{bisect_then_secant, RootTolerance};

/// Leading slope of x(n) that the bound chain as implemented produces.
pub const CHAIN_SLOPE: f64 = 64.0 / PI;
/// Slope 2⁷/π quoted for the same chain in the source derivation.
pub const QUOTED_SLOPE: f64 = 128.0 / PI;
/// K(2,1) as used in the bound chain.
pub const CHAIN_K21: f64 = 2.0 / PI;

/// Volume of the unit sphere S^{D−1} ⊂ ℝ^D.
pub fn unit_sphere_volume(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / ln_gamma(h).exp()
}

/// Optimal Sobolev constant
/// K(D,q) = (q−1)/(D−q) ((D−q)/(D(q−1)))^{1/q} (Γ(D+1)/(Γ(D/q)Γ(D+1−D/q)ω_{D−1}))^{1/D}.
///
/// The first two factors are regrouped as (q−1)^{1−1/q}(D−q)^{1/q−1}D^{−1/q},
/// which is continuous at q = 1 where it equals 1/D.
pub fn kdq(d: u32, q: f64) -> Result<f64> {
    let df = d as f64;
    ensure(d >= 2, || format!("dimension must be at least 2, got {d}"))?;
    ensure(q >= 1.0 && q < df, || format!("need 1 <= q < D, got q = {q}, D = {d}"))?;
    let algebraic = (q - 1.0).powf(1.0 - 1.0 / q) * (df - q).powf(1.0 / q - 1.0) * df.powf(-1.0 / q);
    let ln_ratio = ln_gamma(df + 1.0) - ln_gamma(df / q) - ln_gamma(df + 1.0 - df / q) - unit_sphere_volume(d).ln();
    Ok(algebraic * (ln_ratio / df).exp())
}

/// Sobolev data entering the chain for one manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevConstants {
    pub d: u32,
    pub q: f64,
    pub k: f64,
    /// Aubin constant A_q(0).
    pub a: f64,
}

/// Aubin constant: zero on the plane and the hyperbolic plane; must be
/// supplied for compact manifolds, where no closed form is available.
pub fn aubin_constant(m: &ManifoldSpec, supplied: Option<f64>) -> Result<f64> {
    m.validate()?;
    match (*m, supplied) {
        (ManifoldSpec::Plane | ManifoldSpec::Hyperbolic { .. }, None) => Ok(0.0),
        (_, Some(a)) => {
            ensure(a >= 0.0 && a.is_finite(), || format!("Aubin constant must be >= 0, got {a}"))?;
            Ok(a)
        }
        (other, None) => Err(Error::InvalidInput(format!("no Aubin constant known for {other}; supply one"))),
    }
}

pub fn sobolev_constants(m: &ManifoldSpec, supplied_a: Option<f64>) -> Result<SobolevConstants> {
    Ok(SobolevConstants { d: 2, q: 1.0, k: kdq(2, 1.0)?, a: aubin_constant(m, supplied_a)? })
}

/// f(z) = (1 + βz)² / (1 + αz²).
pub fn ratio(alpha: f64, beta: f64, z: f64) -> f64 {
    (1.0 + beta * z).powi(2) / (1.0 + alpha * z * z)
}

/// Maximizer z* = β/α of `ratio` and its value 1 + β²/α.
pub fn maximize_ratio(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    ensure(alpha > 0.0 && beta > 0.0, || format!("alpha and beta must be positive, got {alpha}, {beta}"))?;
    Ok((beta / alpha, 1.0 + beta * beta / alpha))
}

/// Inputs to the log-space bound solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldProblem {
    pub n: u32,
    pub mu2: f64,
    pub a: f64,
    pub manifold: ManifoldSpec,
}

impl MeanFieldProblem {
    pub fn new(n: u32, mu2: f64, manifold: ManifoldSpec, supplied_a: Option<f64>) -> Result<Self> {
        let p = Self { n, mu2, a: aubin_constant(&manifold, supplied_a)?, manifold };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.n >= 3, || format!("n must be at least 3, got {}", self.n))?;
        ensure(self.mu2 > 0.0 && self.mu2.is_finite(), || format!("mu2 must be positive, got {}", self.mu2))?;
        ensure(self.a >= 0.0 && self.a.is_finite(), || format!("A must be >= 0, got {}", self.a))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldBound {
    pub n: u32,
    /// x = ln(|E|/μ²); the bound is E_gr ≳ −μ² e^x.
    pub x: f64,
    /// True when A = 0: β is undefined and x is the A → 0 limit 64n/π, not a bound.
    pub degenerate: bool,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Solves x = 4πn²A² e^{-x}/μ² + 64n/π, the chain
/// (|E|/4π) ln(|E|/μ²) = n²A²(1 + β²/α) with β²/α = 16|E|/(π²A²n).
///
/// The right side decreases in x, so the root lies in [c, c + a e^{-c}] with
/// c = 64n/π and a = 4πn²A²/μ².
pub fn meanfield_bound(p: &MeanFieldProblem) -> Result<MeanFieldBound> {
    p.validate()?;
    let n = p.n as f64;
    let c = CHAIN_SLOPE * n;
    let mut warnings = Vec::new();
    if p.n < 10 {
        warnings.push(format!("n = {} is below 10; the large-n approximations of the chain are not controlled", p.n));
    }
    if p.a == 0.0 {
        warnings.push("A = 0: beta = 4/(pi A sqrt n) is undefined; reporting the A -> 0 limit x = 64n/pi".to_string());
        return Ok(MeanFieldBound { n: p.n, x: c, degenerate: true, iterations: 0, warnings });
    }
    let a = 4.0 * PI * n * n * p.a * p.a / p.mu2;
    let g = |x: f64| Ok(x - c - a * (-x).exp());
    let width = a * (-c).exp();
    if width == 0.0 || c + width == c {
        return Ok(MeanFieldBound { n: p.n, x: c, degenerate: false, iterations: 0, warnings });
    }
    let root = bisect_then_secant(g, c, c + width, RootTolerance::default(), "mean-field bound equation")?;
    Ok(MeanFieldBound { n: p.n, x: root.x, degenerate: false, iterations: root.iterations, warnings })
}

/// A real profile sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// Radially symmetric profile on the plane, samples at r_i = i·dr, i = 0..len.
    Radial { dr: f64, values: Vec<f64> },
    /// Samples on an N×N periodic grid over the torus of side `length`,
    /// row-major with value (i, j) at (i·h, j·h), h = length/N.
    Torus { length: f64, n: usize, values: Vec<f64> },
}

impl Profile {
    pub fn radial_from_fn(dr: f64, points: usize, f: impl Fn(f64) -> f64) -> Self {
        Profile::Radial { dr, values: (0..points).map(|i| f(i as f64 * dr)).collect() }
    }

    pub fn torus_from_fn(length: f64, n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let h = length / n as f64;
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i as f64 * h, j as f64 * h));
            }
        }
        Profile::Torus { length, n, values }
    }

    /// Normalized Gaussian e^{-r²/(2w²)}/(√π w) on the plane.
    pub fn gaussian_plane(width: f64, dr: f64, points: usize) -> Self {
        Self::radial_from_fn(dr, points, |r| (-r * r / (2.0 * width * width)).exp() / (PI.sqrt() * width))
    }

    /// Periodized Gaussian bump centred in the torus cell, normalized on the grid.
    pub fn gaussian_torus(length: f64, width: f64, n: usize) -> Self {
        let c = 0.5 * length;
        let raw = Self::torus_from_fn(length, n, |x, y| {
            let mut s = 0.0;
            for kx in -2..=2 {
                for ky in -2..=2 {
                    let dx = x - c + kx as f64 * length;
                    let dy = y - c + ky as f64 * length;
                    s += (-(dx * dx + dy * dy) / (2.0 * width * width)).exp();
                }
            }
            s
        });
        let norm = raw.integrate(|v| v * v).sqrt();
        raw.map(|v| v / norm)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        match self {
            Profile::Radial { dr, values } => Profile::Radial { dr: *dr, values: values.iter().map(|&v| f(v)).collect() },
            Profile::Torus { length, n, values } => {
                Profile::Torus { length: *length, n: *n, values: values.iter().map(|&v| f(v)).collect() }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Profile::Radial { dr, values } => {
                ensure(*dr > 0.0, || format!("radial spacing must be positive, got {dr}"))?;
                ensure(values.len() >= 5, || "radial profile needs at least 5 samples".to_string())
            }
            Profile::Torus { length, n, values } => {
                ensure(*length > 0.0, || format!("torus length must be positive, got {length}"))?;
                ensure(*n >= 4 && n % 2 == 0, || format!("torus grid size must be even and >= 4, got {n}"))?;
                ensure(values.len() == n * n, || format!("expected {} samples, got {}", n * n, values.len()))
            }
        }?;
        let finite = match self {
            Profile::Radial { values, .. } | Profile::Torus { values, .. } => values.iter().all(|v| v.is_finite()),
        };
        ensure(finite, || "profile contains non-finite samples".to_string())
    }

    fn same_grid(&self, other: &Profile) -> bool {
        match (self, other) {
            (Profile::Radial { dr: a, values: va }, Profile::Radial { dr: b, values: vb }) => a == b && va.len() == vb.len(),
            (Profile::Torus { length: a, n: na, .. }, Profile::Torus { length: b, n: nb, .. }) => a == b && na == nb,
            _ => false,
        }
    }

    /// ∫ f(u) dμ by the trapezoid rule (2π r dr on the plane, periodic cells on the torus).
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.integrate_pair(self, |a, _| f(a))
    }

    fn integrate_pair(&self, other: &Profile, f: impl Fn(f64, f64) -> f64) -> f64 {
        match (self, other) {
            (Profile::Radial { dr, values }, Profile::Radial { values: w, .. }) => {
                // Trapezoid on F(r) = r f(r) plus the Euler–Maclaurin term
                // h²F'(0)/12 = h² f(0)/12 at the origin; the far end has decayed.
                let last = values.len() - 1;
                let mut s = dr * f(values[0], w[0]) / 12.0;
                for i in 1..=last {
                    let weight = if i == last { 0.5 } else { 1.0 };
                    s += weight * i as f64 * dr * f(values[i], w[i]);
                }
                2.0 * PI * s * dr
            }
            (Profile::Torus { length, n, values }, Profile::Torus { values: w, .. }) => {
                let h = length / *n as f64;
                values.iter().zip(w).map(|(&a, &b)| f(a, b)).sum::<f64>() * h * h
            }
            _ => f64::NAN,
        }
    }

    /// ∫|∇u|² by central differences at spacing `stride`·h.
    fn kinetic_at_stride(&self, stride: usize) -> f64 {
        match self {
            Profile::Radial { dr, values } => {
                let v: Vec<f64> = values.iter().step_by(stride).copied().collect();
                let h = dr * stride as f64;
                let last = v.len() - 1;
                let mut s = 0.0;
                for i in 1..=last {
                    let du = if i == last { (v[i] - v[i - 1]) / h } else { (v[i + 1] - v[i - 1]) / (2.0 * h) };
                    let weight = if i == last { 0.5 } else { 1.0 };
                    s += weight * i as f64 * h * du * du;
                }
                2.0 * PI * s * h
            }
            Profile::Torus { length, n, values } => {
                let m = n / stride;
                let h = length / m as f64;
                let at = |i: usize, j: usize| values[(i % m) * stride * n + (j % m) * stride];
                let mut s = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        let ux = (at(i + 1, j) - at(i + m - 1, j)) / (2.0 * h);
                        let uy = (at(i, j + 1) - at(i, j + m - 1)) / (2.0 * h);
                        s += ux * ux + uy * uy;
                    }
                }
                s * h * h
            }
        }
    }

    /// K[u] = ∫|∇u|², Richardson-extrapolated from spacings h and 2h. Errors
    /// when the two estimates disagree by more than 1%.
    pub fn kinetic(&self) -> Result<f64> {
        self.validate()?;
        let fine = self.kinetic_at_stride(1);
        let coarse = self.kinetic_at_stride(2);
        let disagreement = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
        if disagreement > 0.01 {
            return Err(Error::Profile(format!(
                "grid too coarse for the kinetic term: estimates {fine} (h) and {coarse} (2h) differ by {:.2}%",
                100.0 * disagreement
            )));
        }
        Ok(fine + (fine - coarse) / 3.0)
    }
}

/// Both sides of the mean-field condition at one energy, with the
/// E-independent ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldResidual {
    pub lhs: f64,
    pub rhs: f64,
    /// lhs − rhs.
    pub residual: f64,
    pub kinetic: f64,
    /// ∫|u₀|²ψ₀.
    pub quartic_overlap: f64,
    /// ∫u₀ψ₀.
    pub linear_overlap: f64,
    /// (∫u₀|u₀|²)²/∫|u₀|⁴, at most 1 by Cauchy–Schwarz.
    pub cauchy_schwarz_ratio: f64,
    /// nK[u₀]/|E|, expected to be small for the chain to be consistent.
    pub kinetic_ratio: f64,
}

/// Precomputed profile integrals; the residual is then closed-form in E.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileIntegrals {
    pub kinetic: f64,
    pub quartic_overlap: f64,
    pub linear_overlap: f64,
    pub cauchy_schwarz_ratio: f64,
}

const NORMALIZATION_TOL: f64 = 1e-6;

/// Checks normalization and computes the overlaps. ψ₀ defaults to
/// |u₀|²/‖|u₀|²‖, which saturates Cauchy–Schwarz in the quartic term.
pub fn profile_integrals(m: &ManifoldSpec, u0: &Profile, psi0: Option<&Profile>) -> Result<ProfileIntegrals> {
    m.validate()?;
    u0.validate()?;
    match (m, u0) {
        (ManifoldSpec::Plane, Profile::Radial { .. }) => {}
        (ManifoldSpec::Torus { length }, Profile::Torus { length: l, .. }) if length == l => {}
        _ => return Err(Error::Profile(format!("profile grid does not match {m}; plane takes radial, torus its own cell grid"))),
    }
    let norm = u0.integrate(|v| v * v);
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Profile(format!("u0 is not normalized: ||u0||^2 = {norm}")));
    }
    let quartic = u0.integrate(|v| v.powi(4));
    let cubic = u0.integrate(|v| v.abs() * v * v);
    let default_psi;
    let psi = match psi0 {
        Some(p) => {
            p.validate()?;
            ensure(p.same_grid(u0), || "psi0 must be sampled on the same grid as u0".to_string())?;
            let pn = p.integrate(|v| v * v);
            if (pn - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::Profile(format!("psi0 is not normalized: ||psi0||^2 = {pn}")));
            }
            p
        }
        None => {
            let s = quartic.sqrt();
            default_psi = u0.map(|v| v * v / s);
            &default_psi
        }
    };
    Ok(ProfileIntegrals {
        kinetic: u0.kinetic()?,
        quartic_overlap: u0.integrate_pair(psi, |a, b| a * a * b),
        linear_overlap: u0.integrate_pair(psi, |a, b| a * b),
        cauchy_schwarz_ratio: cubic * cubic / quartic,
    })
}

/// Residual (1/8π) ln(|E|/μ²) − [n²/2 (∫|u₀|²ψ₀)² + 2n (∫u₀ψ₀)²] / (|E| + nK[u₀]).
pub fn residual_from_integrals(ints: &ProfileIntegrals, n: u32, mu2: f64, e: f64) -> Result<MeanFieldResidual> {
    ensure(n >= 2, || format!("n must be at least 2, got {n}"))?;
    ensure(mu2 > 0.0, || format!("mu2 must be positive, got {mu2}"))?;
    ensure(e < 0.0 && e.is_finite(), || format!("energy must be negative, got {e}"))?;
    let nf = n as f64;
    let abs_e = -e;
    let lhs = (abs_e / mu2).ln() / (8.0 * PI);
    let numerator = 0.5 * nf * nf * ints.quartic_overlap.powi(2) + 2.0 * nf * ints.linear_overlap.powi(2);
    let rhs = numerator / (abs_e + nf * ints.kinetic);
    Ok(MeanFieldResidual {
        lhs,
        rhs,
        residual: lhs - rhs,
        kinetic: ints.kinetic,
        quartic_overlap: ints.quartic_overlap,
        linear_overlap: ints.linear_overlap,
        cauchy_schwarz_ratio: ints.cauchy_schwarz_ratio,
        kinetic_ratio: nf * ints.kinetic / abs_e,
    })
}

pub fn meanfield_residual(
    m: &ManifoldSpec,
    n: u32,
    mu2: f64,
    e: f64,
    u0: &Profile,
    psi0: Option<&Profile>,
) -> Result<MeanFieldResidual> {
    residual_from_integrals(&profile_integrals(m, u0, psi0)?, n, mu2, e)
}

/// Energy at which the residual changes sign (LHS increases and RHS
/// decreases in |E|, so it is unique).
pub fn meanfield_crossing(ints: &ProfileIntegrals, n: u32, mu2: f64) -> Result<f64> {
    let f = |u: f64| Ok(residual_from_integrals(ints, n, mu2, -u.exp())?.residual);
    let centre = mu2.ln();
    let mut hi = centre + 1.0;
    while f(hi)? <= 0.0 {
        hi += 2.0 * (hi - centre);
        ensure(hi < 700.0, || "mean-field crossing beyond representable energies".to_string())?;
    }
    let mut lo = centre - 1.0;
    while f(lo)? >= 0.0 {
        lo -= 2.0 * (centre - lo);
        ensure(lo > -700.0, || "mean-field crossing below representable energies".to_string())?;
    }
    let tol = RootTolerance { x_abs: 1e-14, ..RootTolerance::default() };
    Ok(-bisect_then_secant(f, lo, hi, tol, "mean-field residual")?.x.exp())
}
