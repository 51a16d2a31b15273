//! Matrix pencils `A - lambda B`: generalized Schur decomposition, generalized
//! eigenvalues, regularity, and the k-compound pencil
//! `(A, B)^(k) = A^(k) - lambda B^(k)`.

mod qz;

pub(crate) use qz::{reorder_schur, schur};

use std::fmt;

use crate::compound::{compound_of, compound_scale, wedge};
use crate::error::{Error, Result};
use crate::linalg::{null_space, null_space_floor, rank, rank_floor, singular_values, svd};
use crate::matrix::{vec_norm, vec_sub, Matrix, C64, ONE, ZERO};
use crate::options::Options;

/// The pencil `A - lambda B` of two square matrices of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    a: Matrix,
    b: Matrix,
    /// Magnitude of the data `A` and `B` were computed from; zero tests are
    /// measured against at least this scale. Zero for user-supplied pencils.
    scale_hint: f64,
}

impl Pencil {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(Error::Shape {
                op: "Pencil::new",
                detail: format!(
                    "need square matrices of equal size, got {}x{} and {}x{}",
                    a.rows(),
                    a.cols(),
                    b.rows(),
                    b.cols()
                ),
            });
        }
        Ok(Self {
            a,
            b,
            scale_hint: 0.0,
        })
    }

    /// Declares that `A` and `B` carry rounding errors relative to `hint`
    /// rather than to their own norms (as for compound pencils).
    pub fn with_scale_hint(mut self, hint: f64) -> Self {
        self.scale_hint = hint;
        self
    }

    pub fn scale_hint(&self) -> f64 {
        self.scale_hint
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// `A - lambda B`.
    pub fn at(&self, lambda: C64) -> Matrix {
        &self.a - &self.b.scale(lambda)
    }

    /// Scale used for zero tests on Schur diagonals.
    pub(crate) fn scale(&self) -> f64 {
        self.a
            .norm_fro()
            .max(self.b.norm_fro())
            .max(self.scale_hint)
    }
}

/// A generalized eigenvalue in homogeneous form, `lambda = alpha / beta`.
///
/// `beta == 0` marks an infinite eigenvalue; numerically tiny `beta` values
/// are flushed to exactly zero when eigenvalues are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenEig {
    pub alpha: C64,
    pub beta: C64,
}

impl GenEig {
    pub fn finite(lambda: C64) -> Self {
        Self {
            alpha: lambda,
            beta: ONE,
        }
    }

    pub fn infinite() -> Self {
        Self {
            alpha: ONE,
            beta: ZERO,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.beta == ZERO
    }

    pub fn value(&self) -> Option<C64> {
        (!self.is_infinite()).then(|| self.alpha / self.beta)
    }

    /// `|lambda|`, `f64::INFINITY` for infinite eigenvalues.
    pub fn modulus(&self) -> f64 {
        self.value().map_or(f64::INFINITY, |z| z.norm())
    }

    /// Product in homogeneous coordinates; infinite times anything is infinite.
    pub fn product(eigs: &[GenEig]) -> GenEig {
        eigs.iter().fold(GenEig::finite(ONE), |acc, e| GenEig {
            alpha: acc.alpha * e.alpha,
            beta: acc.beta * e.beta,
        })
    }

    /// Chordal distance between the projective points `(alpha : beta)`.
    pub fn chordal_distance(&self, other: &GenEig) -> f64 {
        let num = (self.alpha * other.beta - other.alpha * self.beta).norm();
        let d1 = self.alpha.norm().hypot(self.beta.norm());
        let d2 = other.alpha.norm().hypot(other.beta.norm());
        if d1 == 0.0 || d2 == 0.0 {
            return 1.0;
        }
        (num / (d1 * d2)).min(1.0)
    }
}

impl fmt::Display for GenEig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "inf"),
            Some(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Some(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// Greedy matching of two eigenvalue multisets in the chordal metric.
///
/// Returns the largest matched distance, or `None` if the sizes differ or
/// some eigenvalue has no partner within `tol`.
pub fn match_spectra(left: &[GenEig], right: &[GenEig], tol: f64) -> Option<f64> {
    if left.len() != right.len() {
        return None;
    }
    let mut used = vec![false; right.len()];
    let mut worst = 0.0f64;
    for l in left {
        let best = right
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, r)| (j, l.chordal_distance(r)))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        if best.1 > tol {
            return None;
        }
        used[best.0] = true;
        worst = worst.max(best.1);
    }
    Some(worst)
}

/// Joint triangularization `U A V = T`, `U B V = S` with `U`, `V` unitary.
#[derive(Debug, Clone)]
pub struct GsdResult {
    pub u: Matrix,
    pub v: Matrix,
    pub t: Matrix,
    pub s: Matrix,
}

impl GsdResult {
    /// Relative residuals `[|UAV - T|/|A|, |UBV - S|/|B|, |U*U - I|, |V*V - I|]`
    /// (Frobenius norms).
    pub fn residuals(&self, p: &Pencil) -> [f64; 4] {
        let n = p.dim();
        let id = Matrix::identity(n);
        let rel = |x: f64, s: f64| if s == 0.0 { x } else { x / s };
        let ra = (&(&(&self.u * p.a()) * &self.v) - &self.t).norm_fro();
        let rb = (&(&(&self.u * p.b()) * &self.v) - &self.s).norm_fro();
        [
            rel(ra, p.a().norm_fro()),
            rel(rb, p.b().norm_fro()),
            (&(&self.u.adjoint() * &self.u) - &id).norm_fro(),
            (&(&self.v.adjoint() * &self.v) - &id).norm_fro(),
        ]
    }

    pub fn diagonal_pairs(&self) -> Vec<(C64, C64)> {
        (0..self.t.rows())
            .map(|i| (self.t[(i, i)], self.s[(i, i)]))
            .collect()
    }
}

/// Generalized Schur decomposition of the pencil.
pub fn gsd(p: &Pencil) -> Result<GsdResult> {
    let q = qz::qz(p.a(), p.b())?;
    Ok(GsdResult {
        u: q.u,
        v: q.v,
        t: q.t,
        s: q.s,
    })
}

/// The `n` generalized eigenvalues `(T_ii, S_ii)` of a regular pencil.
///
/// Fails with [`Error::SingularPencil`] when some diagonal pair is
/// numerically `(0, 0)`, relative to `max(|A|_F, |B|_F)`.
pub fn generalized_eigenvalues(p: &Pencil, opts: &Options) -> Result<Vec<GenEig>> {
    let g = gsd(p)?;
    eigenvalues_from_gsd(p, &g, opts)
}

pub(crate) fn eigenvalues_from_gsd(
    p: &Pencil,
    g: &GsdResult,
    opts: &Options,
) -> Result<Vec<GenEig>> {
    let zero = opts.pencil_zero * p.scale();
    let mut out = Vec::with_capacity(p.dim());
    for (i, (alpha, beta)) in g.diagonal_pairs().into_iter().enumerate() {
        let a_small = alpha.norm() <= zero;
        let b_small = beta.norm() <= zero;
        if a_small && b_small {
            return Err(Error::SingularPencil { index: i });
        }
        out.push(GenEig {
            alpha,
            beta: if b_small { ZERO } else { beta },
        });
    }
    Ok(out)
}

/// An eigenvector for `e`: a unit vector minimizing `|(beta A - alpha B) v|`.
pub fn eigenvector(p: &Pencil, e: &GenEig) -> Vec<C64> {
    let m = &p.a().scale(e.beta) - &p.b().scale(e.alpha);
    let s = svd(&m);
    s.v.col(s.v.cols() - 1)
}

/// Outcome of a regularity test.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub regular: bool,
    /// A shift with `A - lambda B` of full numerical rank, when one was found.
    pub witness_lambda: Option<C64>,
    pub det_a: C64,
    pub det_b: C64,
    /// A unit vector `z` in `ker A ∩ ker B`, when the pencil is singular and
    /// such a vector exists.
    pub common_kernel_vector: Option<Vec<C64>>,
}

/// Regularity by the deterministic shift ladder: a pencil of dimension `n`
/// is singular iff `det(A - lambda B)` vanishes at `n + 1` distinct shifts.
pub fn is_regular(p: &Pencil, opts: &Options) -> RegularityReport {
    let n = p.dim();
    let det_a = p.a().det().unwrap_or(ZERO);
    let det_b = p.b().det().unwrap_or(ZERO);
    for lambda in opts.shifts.candidates(n) {
        let floor = p.scale_hint * (1.0 + lambda.norm());
        if rank_floor(&p.at(lambda), opts.rank, floor) == n {
            return RegularityReport {
                regular: true,
                witness_lambda: Some(lambda),
                det_a,
                det_b,
                common_kernel_vector: None,
            };
        }
    }
    RegularityReport {
        regular: false,
        witness_lambda: None,
        det_a,
        det_b,
        common_kernel_vector: common_kernel(p, opts),
    }
}

fn stack(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = a.shape();
    let mut s = Matrix::zeros(2 * n, m);
    for i in 0..n {
        for j in 0..m {
            s[(i, j)] = a[(i, j)];
            s[(n + i, j)] = b[(i, j)];
        }
    }
    s
}

fn common_kernel(p: &Pencil, opts: &Options) -> Option<Vec<C64>> {
    let ns = null_space_floor(&stack(p.a(), p.b()), opts.rank, p.scale_hint);
    (ns.cols() > 0).then(|| ns.col(0))
}

/// Smallest singular value of `[A; B]`, zero iff the kernels intersect.
pub fn common_kernel_gap(a: &Matrix, b: &Matrix) -> f64 {
    singular_values(&stack(a, b)).last().copied().unwrap_or(0.0)
}

/// The k-compound pencil `(A^(k), B^(k))`, of dimension `C(n, k)`.
///
/// The result carries the scale hint `max(sigma_max(A), sigma_max(B))^k`.
pub fn kcompound_pencil(p: &Pencil, k: usize) -> Result<Pencil> {
    if k == 1 {
        return Ok(p.clone());
    }
    let hint = compound_scale(p.a(), k).max(compound_scale(p.b(), k));
    Ok(Pencil::new(compound_of(p.a(), k)?, compound_of(p.b(), k)?)?.with_scale_hint(hint))
}

/// Regularity of `(A, B)^(k)` for `k >= 2`.
///
/// The compound pencil is singular iff `det A = det B = 0`; in that case a
/// common kernel vector of `A^(k)` and `B^(k)` is built as the wedge of a
/// kernel vector of `A`, a kernel vector of `B` (when independent of the
/// first), and orthonormal completions.
pub fn compound_regularity(p: &Pencil, k: usize, opts: &Options) -> Result<RegularityReport> {
    let n = p.dim();
    if k < 2 || k > n {
        return Err(Error::InvalidOrder { k, n });
    }
    let det_a = p.a().det()?;
    let det_b = p.b().det()?;
    let a_singular = rank(p.a(), opts.rank) < n;
    let b_singular = rank(p.b(), opts.rank) < n;
    let cp = kcompound_pencil(p, k)?;

    if !(a_singular && b_singular) {
        let witness = if !a_singular {
            Some(ZERO)
        } else {
            is_regular(&cp, opts).witness_lambda
        };
        return Ok(RegularityReport {
            regular: true,
            witness_lambda: witness,
            det_a,
            det_b,
            common_kernel_vector: None,
        });
    }

    let z = kernel_wedge(p, k, opts)?;
    let norm = vec_norm(&z);
    let z: Vec<C64> = z.iter().map(|c| c / norm).collect();
    Ok(RegularityReport {
        regular: false,
        witness_lambda: None,
        det_a,
        det_b,
        common_kernel_vector: Some(z),
    })
}

/// `[x y w_3 ... w_k]^(k)` (or `[x w_2 ... w_k]^(k)` when `x`, `y` are
/// dependent) for `x` in `ker A`, `y` in `ker B`.
pub(crate) fn kernel_wedge(p: &Pencil, k: usize, opts: &Options) -> Result<Vec<C64>> {
    let n = p.dim();
    let ka = null_space(p.a(), opts.rank);
    let kb = null_space(p.b(), opts.rank);
    if ka.cols() == 0 || kb.cols() == 0 {
        return Err(Error::HypothesisViolated(
            "need det(A) = det(B) = 0 for a common compound kernel".into(),
        ));
    }
    let x = ka.col(0);
    // pick the kernel vector of B least aligned with x
    let y = (0..kb.cols())
        .map(|j| kb.col(j))
        .min_by(|u, v| {
            let cu = crate::matrix::vec_dot(&x, u).norm();
            let cv = crate::matrix::vec_dot(&x, v).norm();
            cu.total_cmp(&cv)
        })
        .expect("non-empty kernel");
    let overlap = crate::matrix::vec_dot(&x, &y).norm();
    let mut cols = vec![x];
    if (1.0 - overlap * overlap).max(0.0).sqrt() > 1e-6 {
        cols.push(y);
    }
    let need = k.saturating_sub(cols.len());
    let extra = crate::linalg::complete_basis(n, &cols, need);
    cols.extend(extra);
    cols.truncate(k);
    wedge(&cols)
}

/// Eigenpair of `(A, B)^(k)` from `k` eigenpairs `(lambda_i, v_i)` of `(A, B)`:
/// `(prod lambda_i, [v_1 ... v_k]^(k))`.
pub fn compound_eigenpair(
    p: &Pencil,
    pairs: &[(C64, Vec<C64>)],
    k: usize,
    opts: &Options,
) -> Result<(C64, Vec<C64>)> {
    let n = p.dim();
    if k < 1 || k > n {
        return Err(Error::InvalidOrder { k, n });
    }
    if pairs.len() != k {
        return Err(Error::Shape {
            op: "compound_eigenpair",
            detail: format!("expected {k} eigenpairs, got {}", pairs.len()),
        });
    }
    let na = p.a().norm_fro();
    let nb = p.b().norm_fro();
    for (i, (lambda, v)) in pairs.iter().enumerate() {
        if v.len() != n {
            return Err(Error::Shape {
                op: "compound_eigenpair",
                detail: format!("eigenvector {i} has length {}, expected {n}", v.len()),
            });
        }
        let av = p.a().mul_vec(v);
        let bv: Vec<C64> = p.b().mul_vec(v).iter().map(|z| z * lambda).collect();
        let residual = vec_norm(&vec_sub(&av, &bv));
        let scale = (na + lambda.norm() * nb) * vec_norm(v);
        if residual > opts.eigenpair * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotAnEigenpair {
                index: i,
                residual: residual / scale.max(f64::MIN_POSITIVE),
            });
        }
    }
    let lambda: C64 = pairs.iter().map(|(l, _)| *l).product();
    let vectors: Vec<Vec<C64>> = pairs.iter().map(|(_, v)| v.clone()).collect();
    Ok((lambda, wedge(&vectors)?))
}
