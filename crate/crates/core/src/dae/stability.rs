use std::fmt;

use super::DaeAnalysis;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pencil::{reorder_schur, schur, GenEig};

/// Asymptotic behaviour of solutions from consistent initial conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityVerdict {
    /// All finite eigenvalues satisfy `|lambda| < 1 - margin`.
    Stable,
    /// No eigenvalue exceeds `1 + margin`, but some lie in the band
    /// `[1 - margin, 1 + margin]` around the unit circle.
    Marginal,
    /// Some finite eigenvalue has `|lambda| > 1 + margin`.
    Unstable,
}

impl StabilityVerdict {
    pub fn classify(eigs: &[GenEig], margin: f64) -> Self {
        let top = eigs.iter().map(GenEig::modulus).fold(0.0, f64::max);
        Self::from_modulus(top, margin)
    }

    pub(crate) fn from_modulus(top: f64, margin: f64) -> Self {
        if top > 1.0 + margin {
            StabilityVerdict::Unstable
        } else if top >= 1.0 - margin {
            StabilityVerdict::Marginal
        } else {
            StabilityVerdict::Stable
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityVerdict::Stable => "stable",
            StabilityVerdict::Marginal => "marginal",
            StabilityVerdict::Unstable => "unstable",
        }
    }
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct StableSubspace {
    pub k: usize,
    /// Largest k-fold product of finite eigenvalue moduli.
    pub max_product: f64,
    /// `max_product < 1 - margin`: the k-compound system is asymptotically
    /// stable.
    pub compound_stable: bool,
    /// `dim V1 - k + 1` when `compound_stable`, otherwise 0.
    pub guaranteed_stable_dim: usize,
    /// Orthonormal columns spanning the invariant subspace of the finite
    /// eigenvalues inside the unit disk; empty unless `compound_stable`.
    pub stable_basis: Matrix,
}

/// Stable-subspace guarantee from the k-compound system.
///
/// If every product `|lambda_a1| ... |lambda_ak|` over k distinct finite
/// eigenvalues is below one, solutions from a subspace of consistent initial
/// conditions of dimension at least `dim V1 - k + 1` decay to zero. The basis
/// comes from an ordered Schur form of the propagator on the consistency
/// subspace, which also covers defective eigenvalues.
pub fn stable_subspace_bound(analysis: &DaeAnalysis, k: usize) -> Result<StableSubspace> {
    analysis.require_tractable()?;
    let s = analysis.consistent_dim();
    if k < 1 || k > s {
        return Err(Error::InvalidOrder { k, n: s });
    }
    let margin = analysis.options.stability_margin;
    let mut moduli: Vec<f64> = analysis.finite_eigs.iter().map(GenEig::modulus).collect();
    moduli.sort_by(|x, y| y.total_cmp(x));
    let max_product: f64 = moduli[..k].iter().product();
    let compound_stable = max_product < 1.0 - margin;
    let n = analysis.system.dim();
    if !compound_stable {
        return Ok(StableSubspace {
            k,
            max_product,
            compound_stable,
            guaranteed_stable_dim: 0,
            stable_basis: Matrix::zeros(n, 0),
        });
    }
    let (z, t) = schur(&analysis.restricted_propagator())?;
    let (z, _, m) = reorder_schur(z, t, |lambda| lambda.norm() < 1.0 - margin);
    let stable_basis = &analysis.consistency_basis * &z.leading_cols(m);
    Ok(StableSubspace {
        k,
        max_product,
        compound_stable,
        guaranteed_stable_dim: s - k + 1,
        stable_basis,
    })
}
