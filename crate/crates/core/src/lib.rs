//! Heat-kernel renormalization of two-body contact interactions for bosons on
//! 2D model manifolds, with the exactly solvable 1D problem as a cross-check.
//!
//! Units: ħ = 2m = 1, so the free Hamiltonian is −∇² and energies have units
//! of 1/length².

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod manifolds;
pub mod meanfield2d;
pub mod onedim;
pub mod ode;
pub mod output;
pub mod principal;
pub mod quad;
pub mod renorm;
pub mod roots;
pub mod special;

pub use error::{Error, Result};
pub use manifolds::{HeatKernelValue, ManifoldSpec, SpectralBasis};
