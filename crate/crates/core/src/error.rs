//! Error type shared by every module of the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation that needs a finite volume was given a non-compact manifold.
    #[error("operation requires a compact manifold, got {0}")]
    NonCompact(String),

    /// The operation is not defined for this geometry.
    #[error("unsupported manifold for {op}: {manifold}")]
    UnsupportedManifold { op: &'static str, manifold: String },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed on [{a}, {b}]: estimate {estimate}, error {error_estimate} > tolerance {tolerance}")]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        error_estimate: f64,
        tolerance: f64,
    },

    /// A monotone function had no sign change inside the searched window.
    #[error("no sign change of {what} in [{lo}, {hi}] (values {f_lo}, {f_hi})")]
    NoSignChange {
        what: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// The coupling flow would cross the Landau pole.
    #[error("Landau pole: 1 + (lambda_R/4pi) ln(gamma) = {denominator} <= 0 for lambda_R = {lambda_r}, gamma = {gamma}")]
    LandauPole {
        lambda_r: f64,
        gamma: f64,
        denominator: f64,
    },

    /// A cutoff so large that the bare coupling is not representable.
    #[error("cutoff beyond representable range: eps*mu^2 = {0}")]
    CutoffOutOfRange(f64),

    /// An iterative procedure failed to converge; `trace` carries the last iterates.
    #[error("{what} did not converge after {iterations} iterations (last iterates: {trace:?})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        trace: Vec<f64>,
    },

    /// A sampled profile failed a consistency check.
    #[error("profile check failed: {0}")]
    Profile(String),

    /// Configuration errors; every violated constraint is listed.
    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::NonCompact(_)
                | Error::UnsupportedManifold { .. }
                | Error::LandauPole { .. }
                | Error::Config(_)
                | Error::Profile(_)
                | Error::Json(_)
        )
    }

    /// Stable short identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::NonCompact(_) => "non_compact",
            Error::UnsupportedManifold { .. } => "unsupported_manifold",
            Error::Quadrature { .. } => "quadrature",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::LandauPole { .. } => "landau_pole",
            Error::CutoffOutOfRange(_) => "cutoff_out_of_range",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Profile(_) => "profile",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg()))
    }
}
