//! Truncated Laplacian spectra of the compact model manifolds.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{sphere, ManifoldSpec};
use crate::error::{Error, Result};
use crate::output::format_f64;

/// One eigenvalue σ_l of −∇² with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralEntry {
    pub sigma: f64,
    pub degeneracy: u64,
}

/// Eigenvalues up to `truncation_cutoff`, sorted strictly increasing, with an
/// upper bound on the heat-trace contribution of everything omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBasis {
    pub entries: Vec<SpectralEntry>,
    pub truncation_cutoff: f64,
    /// Upper bound on Σ_{omitted} d e^{-σ s} at `reference_time`.
    pub tail_bound: f64,
    pub reference_time: f64,
}

impl SpectralBasis {
    /// Spectrum of `m` with all σ ≤ `cutoff`.
    pub fn build(m: &ManifoldSpec, cutoff: f64, reference_time: f64) -> Result<Self> {
        m.validate()?;
        if !(cutoff >= 0.0) || !(reference_time > 0.0) {
            return Err(Error::InvalidInput(format!(
                "spectral cutoff must be >= 0 and reference time > 0 (got {cutoff}, {reference_time})"
            )));
        }
        match *m {
            ManifoldSpec::Sphere { radius } => {
                let r2 = radius * radius;
                let mut entries = Vec::new();
                let mut l = 0usize;
                while (l * (l + 1)) as f64 / r2 <= cutoff {
                    entries.push(SpectralEntry {
                        sigma: (l * (l + 1)) as f64 / r2,
                        degeneracy: (2 * l + 1) as u64,
                    });
                    l += 1;
                }
                let tail_bound = sphere::trace_tail_bound(l - 1, reference_time / r2);
                Ok(Self { entries, truncation_cutoff: cutoff, tail_bound, reference_time })
            }
            ManifoldSpec::Torus { length } => {
                let unit = 4.0 * PI * PI / (length * length);
                let nmax = (cutoff / unit).floor() as i64;
                let kmax = (nmax as f64).sqrt().floor() as i64;
                let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
                for a in -kmax..=kmax {
                    for b in -kmax..=kmax {
                        let n2 = a * a + b * b;
                        if n2 <= nmax {
                            *counts.entry(n2).or_default() += 1;
                        }
                    }
                }
                let entries = counts
                    .into_iter()
                    .map(|(n2, d)| SpectralEntry { sigma: unit * n2 as f64, degeneracy: d })
                    .collect();
                // Omitted modes have |n_1| > k or |n_2| > k with k = ⌊√(nmax/2)⌋.
                let a = unit * reference_time;
                let k = ((nmax as f64) / 2.0).sqrt().floor();
                let theta = crate::special::gaussian_lattice_sum(a, 0.0);
                let one_axis_tail = 2.0 * (-a * (k + 1.0).powi(2)).exp() / (1.0 - (-a * (2.0 * k + 3.0)).exp());
                let tail_bound = 2.0 * theta * one_axis_tail;
                Ok(Self { entries, truncation_cutoff: cutoff, tail_bound, reference_time })
            }
            other => Err(Error::NonCompact(other.to_string())),
        }
    }

    /// Partial trace Σ d e^{-σ s} over the retained entries.
    pub fn partial_trace(&self, s: f64) -> f64 {
        self.entries.iter().rev().map(|e| e.degeneracy as f64 * (-e.sigma * s).exp()).sum()
    }

    /// CSV dump with header `sigma,degeneracy`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "sigma,degeneracy")?;
        for e in &self.entries {
            writeln!(out, "{},{}", format_f64(e.sigma), e.degeneracy)?;
        }
        Ok(())
    }
}
