//! Drazin index and Drazin inverse.
//!
//! With `q = index(A)` and `r = rank(A^q)`, let `A^q = U S V*` and keep the
//! leading `r` singular vectors `U_r`, `V_r`. Then
//! `A^D = U_r (V_r* A U_r)^-1 V_r*`, which agrees with the pseudoinverse
//! sandwich `A^q pinv(A^(2q+1)) A^q` but inverts only an `r x r` core whose
//! condition number does not grow with the power. Powers are formed from
//! `A / sigma_max(A)` so that they neither overflow nor underflow; the scale
//! is restored at the end.

use crate::error::{Error, Result};
use crate::linalg::{singular_values, svd};
use crate::matrix::Matrix;
use crate::options::{Options, RankTol};

#[derive(Debug, Clone, PartialEq)]
pub struct DrazinResult {
    pub index: usize,
    pub inverse: Matrix,
    /// `rank(A^0), rank(A^1), ..., rank(A^(index+1))`.
    pub rank_sequence: Vec<usize>,
}

fn require_square(a: &Matrix, op: &'static str) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::Shape {
            op,
            detail: format!("expected a square matrix, got {}x{}", a.rows(), a.cols()),
        })
    }
}

/// Numerical rank of the `j`-th power of a matrix with unit spectral norm.
///
/// Rounding in `j` successive products perturbs the singular values by about
/// `j n eps`, so that floor is added to the usual threshold.
fn power_rank(sigma: &[f64], n: usize, j: usize, tol: RankTol) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    let floor = 10.0 * (j.max(1) * n) as f64 * f64::EPSILON;
    let thr = tol.threshold(n, n, smax).max(floor);
    sigma.iter().filter(|&&s| s > thr).count()
}

struct Powers {
    /// `A / s`
    unit: Matrix,
    scale: f64,
    /// `(A / s)^0, (A / s)^1, ...` up to `index + 1`
    powers: Vec<Matrix>,
    ranks: Vec<usize>,
}

fn index_powers(a: &Matrix, tol: RankTol, floor: f64) -> Powers {
    let n = a.rows();
    let smax = singular_values(a)
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(floor);
    let scale = if smax > 0.0 { smax } else { 1.0 };
    let unit = a.scale_real(1.0 / scale);
    let mut powers = vec![Matrix::identity(n)];
    let mut ranks = vec![n];
    loop {
        let j = powers.len();
        let next = &powers[j - 1] * &unit;
        let r = power_rank(&singular_values(&next), n, j, tol);
        powers.push(next);
        ranks.push(r);
        if r == ranks[j - 1] || j > n {
            break;
        }
    }
    Powers {
        unit,
        scale,
        powers,
        ranks,
    }
}

/// Minimal `q >= 0` with `rank(A^q) = rank(A^(q+1))`.
pub fn drazin_index(a: &Matrix, tol: RankTol) -> Result<usize> {
    require_square(a, "drazin_index")?;
    Ok(index_powers(a, tol, 0.0).ranks.len() - 2)
}

/// Drazin index and inverse of a square matrix.
///
/// Fails with [`Error::IllConditionedCore`] when the condition number of the
/// core `V_r* A U_r` exceeds `opts.drazin_condition`.
pub fn drazin_inverse(a: &Matrix, opts: &Options) -> Result<DrazinResult> {
    drazin_inverse_with_scale(a, opts, 0.0)
}

/// As [`drazin_inverse`], for a matrix computed from data of magnitude
/// `scale`: rank decisions on powers are measured against
/// `max(sigma_max(A), scale)`. For a compound `A^(k)` pass
/// `compound_scale(A, k)`, so that a compound consisting of rounding noise is
/// recognised as zero.
pub fn drazin_inverse_with_scale(a: &Matrix, opts: &Options, scale: f64) -> Result<DrazinResult> {
    require_square(a, "drazin_inverse")?;
    let n = a.rows();
    let p = index_powers(a, opts.rank, scale);
    let index = p.ranks.len() - 2;
    let rank = p.ranks[index];
    if rank == 0 {
        return Ok(DrazinResult {
            index,
            inverse: Matrix::zeros(n, n),
            rank_sequence: p.ranks,
        });
    }
    if index == 0 {
        let condition = condition(a);
        if !(condition <= opts.drazin_condition) {
            return Err(Error::IllConditionedCore {
                condition,
                bound: opts.drazin_condition,
                index,
                rank,
            });
        }
        return Ok(DrazinResult {
            index,
            inverse: a.inverse()?,
            rank_sequence: p.ranks,
        });
    }
    // range(A^q) = span(U_r) and its row space span(V_r) split C^n into the
    // invariant core and nilpotent parts; A^D = U_r (V_r* A U_r)^-1 V_r*.
    let s = svd(&p.powers[index]);
    let ur = s.u.leading_cols(rank);
    let vr = s.v.leading_cols(rank);
    let core = &(&vr.adjoint() * &p.unit) * &ur;
    let condition = condition(&core);
    if !(condition <= opts.drazin_condition) {
        return Err(Error::IllConditionedCore {
            condition,
            bound: opts.drazin_condition,
            index,
            rank,
        });
    }
    let x = &(&ur * &core.inverse()?) * &vr.adjoint();
    Ok(DrazinResult {
        index,
        inverse: x.scale_real(1.0 / p.scale),
        rank_sequence: p.ranks,
    })
}

fn condition(a: &Matrix) -> f64 {
    let sv = singular_values(a);
    sv[0] / sv[sv.len() - 1]
}

impl DrazinResult {
    /// Residuals of the defining identities, each relative to its natural
    /// scale: `[|A^(q+1) X - A^q|, |AX - XA|, |XAX - X|]`.
    pub fn axiom_residuals(&self, a: &Matrix) -> [f64; 3] {
        let x = &self.inverse;
        let q = self.index;
        let na = a.norm_fro().max(f64::MIN_POSITIVE);
        let nx = x.norm_fro().max(f64::MIN_POSITIVE);
        let aq = a.pow(q);
        let aq1 = &aq * a;
        let r1 = (&(&aq1 * x) - &aq).norm_fro() / (na.powi(q as i32) * (na * nx).max(1.0));
        let r2 = (&(a * x) - &(x * a)).norm_fro() / (na * nx).max(f64::MIN_POSITIVE);
        let r3 = (&(&(x * a) * x) - x).norm_fro() / (nx * nx * na).max(nx);
        [r1, r2, r3]
    }
}
