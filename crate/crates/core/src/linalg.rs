//! SVD-based helpers: numerical rank, null spaces, pseudoinverse, range bases.
//!
//! The SVD is a one-sided Jacobi iteration on the columns; it is accurate
//! for the small dense matrices handled here, including rank-deficient ones.

use crate::matrix::{vec_dot, vec_norm, Matrix, C64, ZERO};
use crate::options::RankTol;

/// Thin SVD `A = U diag(sigma) V*` with singular values sorted descending.
#[derive(Debug, Clone)]
pub struct Svd {
    /// rows x p, with p = min(rows, cols)
    pub u: Matrix,
    pub sigma: Vec<f64>,
    /// cols x p
    pub v: Matrix,
}

const MAX_SWEEPS: usize = 80;

/// One-sided Jacobi on the columns of a tall matrix: returns the mutually
/// orthogonal columns `A V` and, if requested, the unitary `V` as columns.
fn jacobi_columns(a: &Matrix, want_v: bool) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<C64>> = if want_v {
        (0..n)
            .map(|j| {
                let mut e = vec![ZERO; n];
                e[j] = C64::new(1.0, 0.0);
                e
            })
            .collect()
    } else {
        Vec::new()
    };
    let tol = (m as f64).sqrt() * f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = vec_dot(&w[p], &w[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rotate w_p and e^{-i arg gamma} w_q, whose inner product is real
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let rotate = |cols: &mut Vec<Vec<C64>>| {
                    for i in 0..cols[p].len() {
                        let xp = cols[p][i];
                        let xq = cols[q][i] * phase;
                        cols[p][i] = xp * c - xq * s;
                        cols[q][i] = xp * s + xq * c;
                    }
                };
                rotate(&mut w);
                if want_v {
                    rotate(&mut v);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

/// Singular values with the corresponding left and (optionally) right
/// vectors of a tall matrix, sorted descending.
fn jacobi_svd(a: &Matrix, want_vectors: bool) -> (Vec<f64>, Matrix, Matrix) {
    let (m, n) = a.shape();
    let amax = a.max_abs();
    if amax == 0.0 || !amax.is_finite() {
        let u = Matrix::from_columns(m, &complete_basis(m, &[], n));
        return (vec![0.0; n], u, Matrix::identity(n));
    }
    // scaled to avoid overflow in the squared column norms
    let (w, v) = jacobi_columns(&a.scale_real(1.0 / amax), want_vectors);
    let norms: Vec<f64> = w.iter().map(|c| vec_norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j] * amax).collect();
    if !want_vectors {
        return (sigma, Matrix::zeros(0, 0), Matrix::zeros(0, 0));
    }
    let mut left: Vec<Vec<C64>> = order
        .iter()
        .filter(|&&j| norms[j] > 0.0)
        .map(|&j| w[j].iter().map(|z| z / norms[j]).collect())
        .collect();
    let missing = n - left.len();
    let extra = complete_basis(m, &left, missing);
    left.extend(extra);
    let right: Vec<Vec<C64>> = order.iter().map(|&j| v[j].clone()).collect();
    (
        sigma,
        Matrix::from_columns(m, &left),
        Matrix::from_columns(n, &right),
    )
}

pub fn svd(a: &Matrix) -> Svd {
    let (r, c) = a.shape();
    if r.min(c) == 0 {
        return Svd {
            u: Matrix::zeros(r, 0),
            sigma: Vec::new(),
            v: Matrix::zeros(c, 0),
        };
    }
    if r >= c {
        let (sigma, u, v) = jacobi_svd(a, true);
        Svd { u, sigma, v }
    } else {
        // A* = U' S V'*  gives  A = V' S U'*
        let (sigma, u, v) = jacobi_svd(&a.adjoint(), true);
        Svd { u: v, sigma, v: u }
    }
}

pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let (r, c) = a.shape();
    if r.min(c) == 0 {
        return Vec::new();
    }
    if r >= c {
        jacobi_svd(a, false).0
    } else {
        jacobi_svd(&a.adjoint(), false).0
    }
}

/// Number of singular values above the threshold given by `tol`.
pub fn rank_from_sigma(sigma: &[f64], rows: usize, cols: usize, tol: RankTol) -> usize {
    rank_from_sigma_floor(sigma, rows, cols, tol, 0.0)
}

/// As [`rank_from_sigma`], measuring the threshold against
/// `max(sigma_max, floor)`.
pub fn rank_from_sigma_floor(
    sigma: &[f64],
    rows: usize,
    cols: usize,
    tol: RankTol,
    floor: f64,
) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    let thr = tol.threshold_with_floor(rows, cols, smax, floor);
    sigma.iter().filter(|&&s| s > thr).count()
}

pub fn rank(a: &Matrix, tol: RankTol) -> usize {
    rank_floor(a, tol, 0.0)
}

/// Numerical rank with the threshold measured against `max(sigma_max, floor)`.
pub fn rank_floor(a: &Matrix, tol: RankTol, floor: f64) -> usize {
    rank_from_sigma_floor(&singular_values(a), a.rows(), a.cols(), tol, floor)
}

/// Orthonormal basis of the null space (as columns), dimension `cols - rank`.
pub fn null_space(a: &Matrix, tol: RankTol) -> Matrix {
    null_space_floor(a, tol, 0.0)
}

/// As [`null_space`], with the rank threshold floored as in [`rank_floor`].
pub fn null_space_floor(a: &Matrix, tol: RankTol, floor: f64) -> Matrix {
    let (r, c) = a.shape();
    if c == 0 {
        return Matrix::zeros(0, 0);
    }
    // pad to a square-or-tall matrix so the SVD delivers a full V
    let padded = if r < c {
        let mut p = Matrix::zeros(c, c);
        for i in 0..r {
            for j in 0..c {
                p[(i, j)] = a[(i, j)];
            }
        }
        p
    } else {
        a.clone()
    };
    let s = svd(&padded);
    let rk = rank_from_sigma_floor(&s.sigma, r, c, tol, floor);
    let cols: Vec<usize> = (rk..c).collect();
    let rows: Vec<usize> = (0..c).collect();
    s.v.select(&rows, &cols)
}

/// Truncated Moore-Penrose pseudoinverse keeping the leading `keep`
/// singular triplets.
pub fn pinv_truncated(a: &Matrix, keep: usize) -> Matrix {
    let s = svd(a);
    let mut out = Matrix::zeros(a.cols(), a.rows());
    for t in 0..keep.min(s.sigma.len()) {
        let inv = 1.0 / s.sigma[t];
        for i in 0..a.cols() {
            let vi = s.v[(i, t)] * inv;
            for j in 0..a.rows() {
                out[(i, j)] += vi * s.u[(j, t)].conj();
            }
        }
    }
    out
}

pub fn pinv(a: &Matrix, tol: RankTol) -> Matrix {
    let sv = singular_values(a);
    let rk = rank_from_sigma(&sv, a.rows(), a.cols(), tol);
    pinv_truncated(a, rk)
}

/// Orthonormal basis of `range(a)` with `rank` columns.
///
/// Columns of `a` are orthonormalized in their original order (modified
/// Gram-Schmidt with reorthogonalization, positive diagonal of R), skipping
/// columns that are numerically dependent on earlier ones. If that does not
/// produce exactly `rank` vectors, the leading left singular vectors are used.
pub fn range_basis(a: &Matrix, rank: usize) -> Matrix {
    let n = a.rows();
    if rank == 0 {
        return Matrix::zeros(n, 0);
    }
    let scale = (0..a.cols())
        .map(|j| vec_norm(&a.col(j)))
        .fold(0.0, f64::max);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for j in 0..a.cols() {
        let mut v = a.col(j);
        for _ in 0..2 {
            for q in &basis {
                let d = vec_dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= d * qi;
                }
            }
        }
        let nv = vec_norm(&v);
        if nv > 1e-8 * scale {
            basis.push(v.iter().map(|z| z / nv).collect());
        }
        if basis.len() > rank {
            break;
        }
    }
    if basis.len() == rank {
        return Matrix::from_columns(n, &basis);
    }
    svd(a).u.leading_cols(rank)
}

/// Orthonormal columns completing `vectors` (assumed independent) towards a
/// basis of C^n; returns `count` new vectors orthogonal to all of them.
pub fn complete_basis(n: usize, vectors: &[Vec<C64>], count: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for q in &basis {
            let d = vec_dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= d * qi;
            }
        }
        let nw = vec_norm(&w);
        if nw > 0.0 {
            basis.push(w.iter().map(|z| z / nw).collect());
        }
    }
    let mut added = Vec::new();
    for e in 0..n {
        if added.len() == count {
            break;
        }
        let mut w = vec![ZERO; n];
        w[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in basis.iter() {
                let d = vec_dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= d * qi;
                }
            }
        }
        let nw = vec_norm(&w);
        if nw > 1e-6 {
            let q: Vec<C64> = w.iter().map(|z| z / nw).collect();
            basis.push(q.clone());
            added.push(q);
        }
    }
    added
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq_min_norm(a: &Matrix, b: &[C64], tol: RankTol) -> Vec<C64> {
    pinv(a, tol).mul_vec(b)
}

/// Largest principal-angle sine between the column spans of two matrices with
/// orthonormal columns; `1.0` when the dimensions differ.
pub fn subspace_distance(q1: &Matrix, q2: &Matrix) -> f64 {
    if q1.cols() != q2.cols() {
        return 1.0;
    }
    if q1.cols() == 0 {
        return 0.0;
    }
    // |(I - Q1 Q1*) Q2|_2
    let proj = &(q1 * &q1.adjoint()) * q2;
    let resid = q2 - &proj;
    singular_values(&resid).first().copied().unwrap_or(0.0)
}
