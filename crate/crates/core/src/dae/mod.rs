//! Linear time-invariant difference-algebraic equations `B x(j+1) = A x(j)`.
//!
//! A system is tractable iff the pencil `(A, B)` is regular. For a regular
//! pencil and a shift `lambda` with `A - lambda B` invertible, set
//!
//! ```text
//!     B_hat = (A - lambda B)^-1 B,    A_hat = (A - lambda B)^-1 A.
//! ```
//!
//! Consistent initial conditions are exactly `range(B_hat^q)` with
//! `q = index(B_hat)`, and the solution is `x(j) = (B_hat^D A_hat)^j x(0)`,
//! independent of the shift.

mod compound;
mod stability;

pub use compound::{
    compound_consistency_dim, compound_singular_witness, kcompound_dae, volume_trace,
    CompoundConsistency, VolumeTrace,
};
pub use stability::{stable_subspace_bound, StabilityVerdict, StableSubspace};

use crate::drazin::drazin_inverse_with_scale;
use crate::error::{Error, Result};
use crate::linalg::{lstsq_min_norm, null_space, range_basis, singular_values};
use crate::matrix::{vec_norm, vec_sub, Lu, Matrix, C64};
use crate::options::{Options, RankTol};
use crate::pencil::{is_regular, schur, GenEig, Pencil};

/// The system `B x(j+1) = A x(j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DaeSystem {
    pencil: Pencil,
}

impl DaeSystem {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        Ok(Self {
            pencil: Pencil::new(a, b)?,
        })
    }

    pub fn a(&self) -> &Matrix {
        self.pencil.a()
    }

    pub fn b(&self) -> &Matrix {
        self.pencil.b()
    }

    pub fn dim(&self) -> usize {
        self.pencil.dim()
    }

    pub fn pencil(&self) -> &Pencil {
        &self.pencil
    }

    pub(crate) fn from_pencil(pencil: Pencil) -> Self {
        Self { pencil }
    }

    /// `|B x_next - A x_now|`.
    pub fn residual(&self, x_now: &[C64], x_next: &[C64]) -> f64 {
        vec_norm(&vec_sub(
            &self.b().mul_vec(x_next),
            &self.a().mul_vec(x_now),
        ))
    }
}

/// Solvability record of a DAE.
///
/// For an untractable system only `system`, `tractable` and `options` are
/// meaningful; matrices are empty and `finite_eigs` is empty.
#[derive(Debug, Clone)]
pub struct DaeAnalysis {
    pub system: DaeSystem,
    pub tractable: bool,
    pub shift_lambda: Option<C64>,
    pub b_hat: Matrix,
    pub a_hat: Matrix,
    pub drazin_index: usize,
    /// `B_hat^D A_hat`
    pub propagator: Matrix,
    /// Orthonormal columns spanning `range(B_hat^q)`, the consistent initial
    /// conditions.
    pub consistency_basis: Matrix,
    /// Eigenvalues of the propagator restricted to the consistency subspace,
    /// i.e. the finite eigenvalues of `(A, B)`.
    pub finite_eigs: Vec<GenEig>,
    pub verdict: StabilityVerdict,
    /// `verdict == Stable`: every finite eigenvalue lies strictly inside the
    /// unit disk, by at least the stability margin.
    pub stable: bool,
    pub options: Options,
}

impl DaeAnalysis {
    fn untractable(system: DaeSystem, opts: &Options) -> Self {
        Self {
            system,
            tractable: false,
            shift_lambda: None,
            b_hat: Matrix::zeros(0, 0),
            a_hat: Matrix::zeros(0, 0),
            drazin_index: 0,
            propagator: Matrix::zeros(0, 0),
            consistency_basis: Matrix::zeros(0, 0),
            finite_eigs: Vec::new(),
            verdict: StabilityVerdict::Stable,
            stable: false,
            options: opts.clone(),
        }
    }

    /// Dimension of the consistency subspace.
    pub fn consistent_dim(&self) -> usize {
        self.consistency_basis.cols()
    }

    fn require_tractable(&self) -> Result<()> {
        if self.tractable {
            Ok(())
        } else {
            Err(Error::Untractable)
        }
    }

    /// Coordinates of `x` in the consistency basis, `Pi* x`.
    pub fn project(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.require_tractable()?;
        self.check_len(x)?;
        Ok(self.consistency_basis.adjoint().mul_vec(x))
    }

    /// The point `Pi p` of the consistency subspace with coordinates `p`.
    pub fn lift(&self, p: &[C64]) -> Result<Vec<C64>> {
        self.require_tractable()?;
        if p.len() != self.consistent_dim() {
            return Err(Error::Shape {
                op: "DaeAnalysis::lift",
                detail: format!(
                    "expected {} coordinates, got {}",
                    self.consistent_dim(),
                    p.len()
                ),
            });
        }
        Ok(self.consistency_basis.mul_vec(p))
    }

    /// The propagator restricted to the consistency subspace,
    /// `Pi* (B_hat^D A_hat) Pi`.
    pub fn restricted_propagator(&self) -> Matrix {
        let pi = &self.consistency_basis;
        &(&pi.adjoint() * &self.propagator) * pi
    }

    fn check_len(&self, x: &[C64]) -> Result<()> {
        if x.len() == self.system.dim() {
            Ok(())
        } else {
            Err(Error::Shape {
                op: "dae",
                detail: format!(
                    "expected a vector of length {}, got {}",
                    self.system.dim(),
                    x.len()
                ),
            })
        }
    }
}

/// Tractability, shift, Drazin data, consistency subspace and stability of
/// `B x(j+1) = A x(j)`.
///
/// The shift is the first candidate of `opts.shifts` for which `A - lambda B`
/// has full numerical rank.
pub fn analyze(sys: &DaeSystem, opts: &Options) -> Result<DaeAnalysis> {
    let n = sys.dim();
    let report = is_regular(sys.pencil(), opts);
    let Some(lambda) = report.witness_lambda else {
        return Ok(DaeAnalysis::untractable(sys.clone(), opts));
    };
    let lu = Lu::factor(&sys.pencil().at(lambda));
    let b_hat = lu.solve(sys.b())?;
    let a_hat = lu.solve(sys.a())?;
    // rounding noise in a compound B reaches B_hat amplified by the inverse
    let hint = sys.pencil().scale_hint();
    let floor = if hint > 0.0 {
        hint * singular_values(&lu.inverse()?)
            .first()
            .copied()
            .unwrap_or(0.0)
    } else {
        0.0
    };
    let dz = drazin_inverse_with_scale(&b_hat, opts, floor)?;
    let propagator = &dz.inverse * &a_hat;
    let q = dz.index;
    let r = dz.rank_sequence[q];
    let consistency_basis = if q == 0 {
        Matrix::identity(n)
    } else {
        range_basis(&b_hat.pow(q), r)
    };
    let mut analysis = DaeAnalysis {
        system: sys.clone(),
        tractable: true,
        shift_lambda: Some(lambda),
        b_hat,
        a_hat,
        drazin_index: q,
        propagator,
        consistency_basis,
        finite_eigs: Vec::new(),
        verdict: StabilityVerdict::Stable,
        stable: true,
        options: opts.clone(),
    };
    if r > 0 {
        let (_, t) = schur(&analysis.restricted_propagator())?;
        analysis.finite_eigs = (0..r).map(|i| GenEig::finite(t[(i, i)])).collect();
    }
    analysis.verdict = StabilityVerdict::classify(&analysis.finite_eigs, opts.stability_margin);
    analysis.stable = analysis.verdict == StabilityVerdict::Stable;
    Ok(analysis)
}

/// Outcome of a consistency test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Consistency {
    pub consistent: bool,
    /// Orthogonal distance of `x0` from the consistency subspace.
    pub distance: f64,
}

/// Whether `x0` is a consistent initial condition:
/// `|(I - Pi Pi*) x0| <= tol |x0|`.
pub fn is_consistent(analysis: &DaeAnalysis, x0: &[C64]) -> Result<Consistency> {
    let p = analysis.project(x0)?;
    let back = analysis.consistency_basis.mul_vec(&p);
    let distance = vec_norm(&vec_sub(x0, &back));
    Ok(Consistency {
        consistent: distance <= analysis.options.consistency * vec_norm(x0),
        distance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `x(0), ..., x(N)`
    pub states: Vec<Vec<C64>>,
    /// `|B x(j+1) - A x(j)|` for `j = 0..N-1`
    pub residuals: Vec<f64>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn norms(&self) -> Vec<f64> {
        self.states.iter().map(|x| vec_norm(x)).collect()
    }
}

/// `x(j) = (B_hat^D A_hat)^j x0` for `j = 0..=steps`.
pub fn propagate(analysis: &DaeAnalysis, x0: &[C64], steps: usize) -> Result<Trajectory> {
    let c = is_consistent(analysis, x0)?;
    if !c.consistent {
        return Err(Error::Inconsistent {
            column: None,
            distance: c.distance,
        });
    }
    let mut states = Vec::with_capacity(steps + 1);
    let mut residuals = Vec::with_capacity(steps);
    states.push(x0.to_vec());
    for j in 0..steps {
        let next = analysis.propagator.mul_vec(&states[j]);
        residuals.push(analysis.system.residual(&states[j], &next));
        states.push(next);
    }
    Ok(Trajectory { states, residuals })
}

/// One step of the time-varying system `B(j+1) x(j+1) = A(j) x(j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeVaryingStep {
    /// Minimum-norm least-squares solution.
    pub x_next: Vec<C64>,
    /// `|B(j+1) x_next - A(j) x_now|`
    pub residual: f64,
    /// Nullity of `B(j+1)`; nonzero means `x_next` is not unique.
    pub freedom_dim: usize,
}

/// Guarded least-squares step for time-varying systems. No consistency theory
/// is applied: a positive residual or freedom is reported, not rejected.
pub fn step_time_varying(
    b_next: &Matrix,
    a_now: &Matrix,
    x_now: &[C64],
    tol: RankTol,
) -> Result<TimeVaryingStep> {
    if b_next.rows() != a_now.rows() || a_now.cols() != x_now.len() {
        return Err(Error::Shape {
            op: "step_time_varying",
            detail: format!(
                "B is {}x{}, A is {}x{}, x has length {}",
                b_next.rows(),
                b_next.cols(),
                a_now.rows(),
                a_now.cols(),
                x_now.len()
            ),
        });
    }
    let rhs = a_now.mul_vec(x_now);
    let x_next = lstsq_min_norm(b_next, &rhs, tol);
    let residual = vec_norm(&vec_sub(&b_next.mul_vec(&x_next), &rhs));
    Ok(TimeVaryingStep {
        x_next,
        residual,
        freedom_dim: null_space(b_next, tol).cols(),
    })
}
