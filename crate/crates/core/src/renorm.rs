//! Bare and renormalized couplings, the β-function and the exact coupling flow.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::ode::{dormand_prince, OdeTolerance};
use crate::special::expint_e1;

/// How the theory is fixed: by the two-body binding scale μ², or by a
/// coupling λ_R at scale M.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum RenormScheme {
    BoundState { mu2: f64 },
    Coupling { m: f64, lambda_r: f64 },
}

impl RenormScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RenormScheme::BoundState { mu2 } => {
                ensure(mu2 > 0.0 && mu2.is_finite(), || format!("mu2 must be positive, got {mu2}"))
            }
            RenormScheme::Coupling { m, lambda_r } => {
                ensure(m > 0.0 && m.is_finite(), || format!("M must be positive, got {m}"))?;
                ensure(lambda_r > 0.0 && lambda_r.is_finite(), || format!("lambda_R must be positive, got {lambda_r}"))
            }
        }
    }

    /// ln μ², the scale at which the flat two-body operator vanishes.
    ///
    /// For the coupling scheme this is ln(M² e^{-8π/λ_R}), kept in log form so
    /// that small couplings do not underflow.
    pub fn log_scale(&self) -> f64 {
        match *self {
            RenormScheme::BoundState { mu2 } => mu2.ln(),
            RenormScheme::Coupling { m, lambda_r } => 2.0 * m.ln() - 8.0 * PI / lambda_r,
        }
    }

    /// The equivalent μ² (may underflow to 0 for very weak coupling).
    pub fn mu2(&self) -> f64 {
        self.log_scale().exp()
    }
}

/// λ(ε) from 1/λ(ε) = ∫_ε^∞ e^{-μ²t}/(8πt) dt = E₁(εμ²)/(8π).
pub fn bare_coupling(eps: f64, mu2: f64) -> Result<f64> {
    ensure(eps > 0.0 && eps.is_finite(), || format!("cutoff eps must be positive, got {eps}"))?;
    ensure(mu2 > 0.0 && mu2.is_finite(), || format!("mu2 must be positive, got {mu2}"))?;
    let x = eps * mu2;
    let e1 = expint_e1(x);
    if !(e1 > 0.0) {
        return Err(Error::CutoffOutOfRange(x));
    }
    let lambda = 8.0 * PI / e1;
    if !lambda.is_finite() {
        return Err(Error::CutoffOutOfRange(x));
    }
    Ok(lambda)
}

/// λ_R(M) from a bare coupling fixed by μ² at cutoff ε:
/// 1/λ_R = 1/λ(ε) − E₁(εM²)/(8π) = [E₁(εμ²) − E₁(εM²)]/(8π).
pub fn renormalized_coupling(eps: f64, mu2: f64, m: f64) -> Result<f64> {
    ensure(m > 0.0 && m.is_finite(), || format!("M must be positive, got {m}"))?;
    let inv = 1.0 / bare_coupling(eps, mu2)? - expint_e1(eps * m * m) / (8.0 * PI);
    ensure(inv > 0.0, || format!("M^2 = {} must exceed mu2 = {mu2} for a positive coupling", m * m))?;
    Ok(1.0 / inv)
}

/// β(λ_R) = −λ_R²/(4π).
pub fn beta(lambda_r: f64) -> f64 {
    -lambda_r * lambda_r / (4.0 * PI)
}

fn flow_denominator(lambda_r: f64, gamma: f64) -> Result<f64> {
    ensure(gamma > 0.0 && gamma.is_finite(), || format!("gamma must be positive, got {gamma}"))?;
    ensure(lambda_r.is_finite(), || format!("lambda_R must be finite, got {lambda_r}"))?;
    let denominator = 1.0 + lambda_r / (4.0 * PI) * gamma.ln();
    if denominator <= 0.0 {
        return Err(Error::LandauPole { lambda_r, gamma, denominator });
    }
    Ok(denominator)
}

/// λ_R(γM) = λ_R / (1 + (λ_R/4π) ln γ).
pub fn flow(lambda_r: f64, gamma: f64) -> Result<f64> {
    Ok(lambda_r / flow_denominator(lambda_r, gamma)?)
}

/// λ_R(γM) by integrating dλ/d ln M̄ = β(λ) from ln M to ln γM.
pub fn flow_ode(lambda_r: f64, gamma: f64) -> Result<f64> {
    flow_denominator(lambda_r, gamma)?;
    Ok(dormand_prince(|_, l| beta(l), 0.0, lambda_r, gamma.ln(), OdeTolerance::default())?.y)
}

/// Central difference [λ(e^h) − λ(e^{-h})]/(2h) of the flow in ln M.
pub fn beta_numeric(lambda_r: f64, h: f64) -> Result<f64> {
    ensure(h > 0.0, || format!("step must be positive, got {h}"))?;
    Ok((flow(lambda_r, h.exp())? - flow(lambda_r, (-h).exp())?) / (2.0 * h))
}

/// Reference scale used when a bound-state scheme is turned into a coupling
/// scheme without an explicit M: M = e·μ, where λ_R = 4π.
pub fn default_reference_scale(mu2: f64) -> f64 {
    std::f64::consts::E * mu2.sqrt()
}

/// Coupling at scale M equivalent to the binding scale μ²:
/// 1/λ_R = (1/8π) ln(M²/μ²). Requires M² > μ².
pub fn coupling_at(mu2: f64, m: f64) -> Result<RenormScheme> {
    RenormScheme::BoundState { mu2 }.validate()?;
    ensure(m > 0.0 && m.is_finite(), || format!("M must be positive, got {m}"))?;
    let log_ratio = (m * m / mu2).ln();
    ensure(log_ratio > 0.0, || {
        format!("M^2 = {} must exceed mu2 = {mu2}; at or below it lambda_R is infinite or negative", m * m)
    })?;
    Ok(RenormScheme::Coupling { m, lambda_r: 8.0 * PI / log_ratio })
}

/// BoundState(μ²) ↔ Coupling(M, λ_R) through μ² = M² e^{-8π/λ_R}.
/// A bound-state scheme is mapped to the coupling at `default_reference_scale`.
pub fn scheme_convert(s: &RenormScheme) -> Result<RenormScheme> {
    s.validate()?;
    match *s {
        RenormScheme::BoundState { mu2 } => coupling_at(mu2, default_reference_scale(mu2)),
        RenormScheme::Coupling { .. } => {
            let mu2 = s.mu2();
            ensure(mu2 > 0.0 && mu2.is_finite(), || format!("mu2 = exp({}) is not representable", s.log_scale()))?;
            Ok(RenormScheme::BoundState { mu2 })
        }
    }
}

/// Coupling(M, λ_R) → Coupling(γM, λ_R(γM)).
pub fn rescale(s: &RenormScheme, gamma: f64) -> Result<RenormScheme> {
    s.validate()?;
    match *s {
        RenormScheme::Coupling { m, lambda_r } => Ok(RenormScheme::Coupling { m: gamma * m, lambda_r: flow(lambda_r, gamma)? }),
        RenormScheme::BoundState { .. } => Ok(*s),
    }
}
