//! The k-compound system `B^(k) y(j+1) = A^(k) y(j)`. If the columns of
//! `X(j)` solve the base system, then `y(j) = X(j)^(k)` solves the compound
//! one and `|y(j)|` is the volume of the parallelotope they span.

use super::{analyze, propagate, DaeSystem};
use crate::combinat::binomial;
use crate::compound::{compound_of, wedge};
use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::matrix::{vec_norm, vec_sub, Matrix, C64};
use crate::options::Options;
use crate::pencil::{is_regular, kcompound_pencil, kernel_wedge};

/// `(A^(k), B^(k))` as a system of dimension `C(n, k)`.
pub fn kcompound_dae(sys: &DaeSystem, k: usize) -> Result<DaeSystem> {
    Ok(DaeSystem::from_pencil(kcompound_pencil(sys.pencil(), k)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeTrace {
    pub k: usize,
    /// `y(j) = X(j)^(k)`
    pub compound_states: Vec<Vec<C64>>,
    /// `|y(j)|`
    pub volumes: Vec<f64>,
    /// `|B^(k) y(j+1) - A^(k) y(j)|`
    pub residuals: Vec<f64>,
}

/// Propagates each column of `initial_columns` (n x k) and tracks the
/// k-compound of the resulting bundle.
pub fn volume_trace(
    sys: &DaeSystem,
    initial_columns: &Matrix,
    steps: usize,
    opts: &Options,
) -> Result<VolumeTrace> {
    let n = sys.dim();
    let k = initial_columns.cols();
    if initial_columns.rows() != n || k == 0 || k > n {
        return Err(Error::Shape {
            op: "volume_trace",
            detail: format!(
                "initial columns must be {n}x k with 1 <= k <= {n}, got {}x{}",
                initial_columns.rows(),
                k
            ),
        });
    }
    let analysis = analyze(sys, opts)?;
    if !analysis.tractable {
        return Err(Error::Untractable);
    }
    let mut trajectories = Vec::with_capacity(k);
    for c in 0..k {
        let t = propagate(&analysis, &initial_columns.col(c), steps).map_err(|e| match e {
            Error::Inconsistent { distance, .. } => Error::Inconsistent {
                column: Some(c),
                distance,
            },
            other => other,
        })?;
        trajectories.push(t);
    }
    let ak = compound_of(sys.a(), k)?;
    let bk = compound_of(sys.b(), k)?;
    let mut compound_states = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let cols: Vec<Vec<C64>> = trajectories.iter().map(|t| t.states[j].clone()).collect();
        compound_states.push(wedge(&cols)?);
    }
    let residuals = compound_states
        .windows(2)
        .map(|w| vec_norm(&vec_sub(&bk.mul_vec(&w[1]), &ak.mul_vec(&w[0]))))
        .collect();
    let volumes = compound_states.iter().map(|y| vec_norm(y)).collect();
    Ok(VolumeTrace {
        k,
        compound_states,
        volumes,
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompoundConsistency {
    pub k: usize,
    pub dim_v1: usize,
    /// Computed directly from the k-compound system.
    pub dim_vk: usize,
    /// `C(dim_v1, k)`, zero when `k > dim_v1`.
    pub predicted: usize,
    /// Whether the shifted `B_hat` of the compound system is nilpotent, so
    /// that only the zero initial condition is consistent.
    pub b_hat_nilpotent: bool,
    pub compound_shift: C64,
}

impl CompoundConsistency {
    pub fn matches_prediction(&self) -> bool {
        self.dim_vk == self.predicted
    }
}

/// Dimension of the consistency subspace of the k-compound system, next to
/// the prediction `C(dim V1, k)`.
///
/// Requires `(A, B)` regular and, for `k >= 2`, not both `A` and `B`
/// singular; otherwise the compound pencil is singular and
/// [`Error::HypothesisViolated`] is returned.
pub fn compound_consistency_dim(
    sys: &DaeSystem,
    k: usize,
    opts: &Options,
) -> Result<CompoundConsistency> {
    let n = sys.dim();
    if k < 1 || k > n {
        return Err(Error::InvalidOrder { k, n });
    }
    let base = analyze(sys, opts)?;
    if !base.tractable {
        return Err(Error::HypothesisViolated(
            "the pencil (A, B) is singular".into(),
        ));
    }
    if k >= 2 && rank(sys.a(), opts.rank) < n && rank(sys.b(), opts.rank) < n {
        return Err(Error::HypothesisViolated(format!(
            "det(A) = det(B) = 0, so the {k}-compound pencil is singular"
        )));
    }
    let ck = analyze(&kcompound_dae(sys, k)?, opts)?;
    let Some(compound_shift) = ck.shift_lambda else {
        return Err(Error::HypothesisViolated(format!(
            "no regular shift found for the {k}-compound pencil"
        )));
    };
    let dim_v1 = base.consistent_dim();
    let dim_vk = ck.consistent_dim();
    Ok(CompoundConsistency {
        k,
        dim_v1,
        dim_vk,
        predicted: binomial(dim_v1, k) as usize,
        b_hat_nilpotent: dim_vk == 0,
        compound_shift,
    })
}

/// A unit vector `z` with `A^(k) z = B^(k) z = 0` for a regular `(A, B)`
/// with `det A = det B = 0`. The constant sequence `y(j) = z` solves the
/// k-compound system, which therefore loses uniqueness.
pub fn compound_singular_witness(sys: &DaeSystem, k: usize, opts: &Options) -> Result<Vec<C64>> {
    let n = sys.dim();
    if k < 2 || k > n {
        return Err(Error::InvalidOrder { k, n });
    }
    if !is_regular(sys.pencil(), opts).regular {
        return Err(Error::HypothesisViolated(
            "the pencil (A, B) is singular".into(),
        ));
    }
    if rank(sys.a(), opts.rank) == n || rank(sys.b(), opts.rank) == n {
        return Err(Error::HypothesisViolated(
            "needs det(A) = det(B) = 0".into(),
        ));
    }
    let z = kernel_wedge(sys.pencil(), k, opts)?;
    // unit norm, largest entry real and positive
    let pivot = z
        .iter()
        .copied()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .expect("non-empty");
    let phase = pivot.conj() / pivot.norm();
    let norm = vec_norm(&z);
    let z: Vec<C64> = z.iter().map(|c| c * phase / norm).collect();

    let ak = compound_of(sys.a(), k)?;
    let bk = compound_of(sys.b(), k)?;
    let res = vec_norm(&ak.mul_vec(&z)).max(vec_norm(&bk.mul_vec(&z)));
    let scale = ak.norm_fro().max(bk.norm_fro()).max(1.0);
    if res > opts.consistency * scale {
        return Err(Error::HypothesisViolated(format!(
            "common kernel witness has residual {res:e}"
        )));
    }
    Ok(z)
}
