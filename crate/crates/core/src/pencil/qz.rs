//! Complex QZ: Hessenberg-triangular reduction followed by single-shift
//! implicit iterations, producing unitary `U`, `V` with `U A V = T` and
//! `U B V = S` upper triangular.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, C64, ONE, ZERO};

/// Unitary 2x2 rotation `[[c, s], [-conj(s), c]]` with real `c`.
#[derive(Debug, Clone, Copy)]
struct Rot {
    c: f64,
    s: C64,
}

impl Rot {
    /// Rotation with `G [f; g] = [r; 0]`.
    fn zeroing(f: C64, g: C64) -> Self {
        if g == ZERO {
            return Rot { c: 1.0, s: ZERO };
        }
        if f == ZERO {
            return Rot {
                c: 0.0,
                s: g.conj() / g.norm(),
            };
        }
        let fa = f.norm();
        let norm = fa.hypot(g.norm());
        let phase = f / fa;
        Rot {
            c: fa / norm,
            s: phase * g.conj() / norm,
        }
    }

    /// Rows `i`, `j` of `m` <- G applied on the left.
    fn rows(&self, m: &mut Matrix, i: usize, j: usize) {
        for col in 0..m.cols() {
            let x = m[(i, col)];
            let y = m[(j, col)];
            m[(i, col)] = x * self.c + self.s * y;
            m[(j, col)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Columns `i`, `j` of `m` <- `m M` with `M = [[c, s], [-conj(s), c]]`.
    fn cols(&self, m: &mut Matrix, i: usize, j: usize) {
        for row in 0..m.rows() {
            let x = m[(row, i)];
            let y = m[(row, j)];
            m[(row, i)] = x * self.c - self.s.conj() * y;
            m[(row, j)] = self.s * x + y * self.c;
        }
    }
}

/// Right rotation on columns `(i, j)`, `i < j`, that zeroes entry `(row, i)`.
fn right_zeroing(m: &Matrix, row: usize, i: usize, j: usize) -> Rot {
    // [x y] M = [0 r] with M = [[c, s], [-conj(s), c]] from zeroing(y, x)
    Rot::zeroing(m[(row, j)], m[(row, i)])
}

pub(crate) struct Qz {
    pub u: Matrix,
    pub v: Matrix,
    pub t: Matrix,
    pub s: Matrix,
}

struct State {
    h: Matrix,
    r: Matrix,
    u: Matrix,
    v: Matrix,
}

impl State {
    fn left(&mut self, g: Rot, i: usize, j: usize) {
        g.rows(&mut self.h, i, j);
        g.rows(&mut self.r, i, j);
        g.rows(&mut self.u, i, j);
    }

    fn right(&mut self, g: Rot, i: usize, j: usize) {
        g.cols(&mut self.h, i, j);
        g.cols(&mut self.r, i, j);
        g.cols(&mut self.v, i, j);
    }
}

const MAX_SWEEPS_PER_EIG: usize = 60;

pub(crate) fn qz(a: &Matrix, b: &Matrix) -> Result<Qz> {
    let n = a.rows();
    let mut st = State {
        h: a.clone(),
        r: b.clone(),
        u: Matrix::identity(n),
        v: Matrix::identity(n),
    };
    if n <= 1 {
        return Ok(Qz {
            u: st.u,
            v: st.v,
            t: st.h,
            s: st.r,
        });
    }

    // B -> upper triangular
    for j in 0..n - 1 {
        for i in (j + 1..n).rev() {
            let g = Rot::zeroing(st.r[(i - 1, j)], st.r[(i, j)]);
            st.left(g, i - 1, i);
            st.r[(i, j)] = ZERO;
        }
    }

    // A -> upper Hessenberg, keeping B triangular
    for j in 0..n.saturating_sub(2) {
        for i in (j + 2..n).rev() {
            let g = Rot::zeroing(st.h[(i - 1, j)], st.h[(i, j)]);
            st.left(g, i - 1, i);
            st.h[(i, j)] = ZERO;
            let z = right_zeroing(&st.r, i, i - 1, i);
            st.right(z, i - 1, i);
            st.r[(i, i - 1)] = ZERO;
        }
    }

    let eps = f64::EPSILON;
    let h_scale = a.norm_fro().max(f64::MIN_POSITIVE);
    let r_scale = b.norm_fro().max(f64::MIN_POSITIVE);
    let h_tol = eps * h_scale;
    let r_tol = eps * r_scale;

    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    let mut total = 0usize;
    let budget = MAX_SWEEPS_PER_EIG * n;

    while hi > 0 {
        // negligible subdiagonals
        for l in 1..=hi {
            let sub = st.h[(l, l - 1)].norm();
            let local = eps * (st.h[(l - 1, l - 1)].norm() + st.h[(l, l)].norm());
            if sub <= h_tol || sub <= local {
                st.h[(l, l - 1)] = ZERO;
            }
        }
        let mut lo = hi;
        while lo > 0 && st.h[(lo, lo - 1)] != ZERO {
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        // zero on the diagonal of B: chase it to the bottom and deflate an
        // infinite eigenvalue
        if let Some(j) = (lo..=hi).find(|&j| st.r[(j, j)].norm() <= r_tol) {
            st.r[(j, j)] = ZERO;
            for i in j..hi {
                let g = Rot::zeroing(st.r[(i, i + 1)], st.r[(i + 1, i + 1)]);
                st.left(g, i, i + 1);
                st.r[(i + 1, i + 1)] = ZERO;
                if i > lo {
                    let z = right_zeroing(&st.h, i + 1, i - 1, i);
                    st.right(z, i - 1, i);
                    st.h[(i + 1, i - 1)] = ZERO;
                }
            }
            let z = right_zeroing(&st.h, hi, hi - 1, hi);
            st.right(z, hi - 1, hi);
            st.h[(hi, hi - 1)] = ZERO;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > budget {
            return Err(Error::ConvergenceFailure {
                iterations: total,
                lo,
                hi,
                subdiagonal: st.h[(hi, hi - 1)].norm(),
            });
        }

        let shift = if since_deflation % 11 == 10 {
            // exceptional shift
            st.h[(hi, hi)] / st.r[(hi, hi)] + C64::new(st.h[(hi, hi - 1)].norm(), 0.0) * 1.5
        } else {
            wilkinson_shift(&st.h, &st.r, hi)
        };

        let g = Rot::zeroing(st.h[(lo, lo)] - shift * st.r[(lo, lo)], st.h[(lo + 1, lo)]);
        st.left(g, lo, lo + 1);
        for i in lo + 1..=hi {
            let z = right_zeroing(&st.r, i, i - 1, i);
            st.right(z, i - 1, i);
            st.r[(i, i - 1)] = ZERO;
            if i < hi {
                let g = Rot::zeroing(st.h[(i, i - 1)], st.h[(i + 1, i - 1)]);
                st.left(g, i, i + 1);
                st.h[(i + 1, i - 1)] = ZERO;
            }
        }
    }

    // U accumulates the left rotations: U A V = T
    Ok(Qz {
        u: st.u,
        v: st.v,
        t: st.h,
        s: st.r,
    })
}

/// Eigenvalue of the trailing 2x2 pencil closest to `h[hi,hi] / r[hi,hi]`.
fn wilkinson_shift(h: &Matrix, r: &Matrix, hi: usize) -> C64 {
    let p = hi - 1;
    let (h11, h12, h21, h22) = (h[(p, p)], h[(p, hi)], h[(hi, p)], h[(hi, hi)]);
    let (r11, r12, r22) = (r[(p, p)], r[(p, hi)], r[(hi, hi)]);
    // det(H - mu R) = qa mu^2 + qb mu + qc
    let qa = r11 * r22;
    let qb = -(h11 * r22 + h22 * r11 - r12 * h21);
    let qc = h11 * h22 - h12 * h21;
    let disc = (qb * qb - qa * qc * 4.0).sqrt();
    let (p1, p2) = (qb + disc, qb - disc);
    let q = (if p1.norm() >= p2.norm() { p1 } else { p2 }) * -0.5;
    let mut candidates = Vec::with_capacity(2);
    if q != ZERO {
        if qa != ZERO {
            candidates.push(q / qa);
        }
        candidates.push(qc / q);
    }
    if candidates.is_empty() {
        return h22 / r22;
    }
    let score = |mu: &C64| (h22 - mu * r22).norm();
    candidates
        .into_iter()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .min_by(|x, y| score(x).total_cmp(&score(y)))
        .unwrap_or(h22 / r22)
}

/// Complex Schur form `Z* M Z = T` via QZ on `(M, I)`.
pub(crate) fn schur(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = m.rows();
    let q = qz(m, &Matrix::identity(n))?;
    // U V is upper triangular and unitary, hence diagonal D; then
    // V* M V = D^{-1} T.
    let mut t = q.t;
    for i in 0..n {
        let d = q.s[(i, i)];
        let inv = if d == ZERO {
            ONE
        } else {
            d.conj() / d.norm_sqr()
        };
        for j in 0..n {
            t[(i, j)] *= inv;
        }
    }
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = ZERO;
        }
    }
    Ok((q.v, t))
}

/// Reorders a complex Schur form so that diagonal entries selected by `keep`
/// come first. Returns the updated `(Z, T)` and the number of selected entries.
pub(crate) fn reorder_schur(
    mut z: Matrix,
    mut t: Matrix,
    keep: impl Fn(C64) -> bool,
) -> (Matrix, Matrix, usize) {
    let n = t.rows();
    let mut placed = 0;
    for start in 0..n {
        if !keep(t[(start, start)]) {
            continue;
        }
        // bubble entry at `start` up to position `placed`
        let mut pos = start;
        while pos > placed {
            swap_adjacent(&mut z, &mut t, pos - 1);
            pos -= 1;
        }
        placed += 1;
    }
    (z, t, placed)
}

/// Swaps diagonal entries `i`, `i+1` of the triangular `t` by a unitary
/// similarity, updating `z` accordingly.
fn swap_adjacent(z: &mut Matrix, t: &mut Matrix, i: usize) {
    let j = i + 1;
    let (a, b, c) = (t[(i, i)], t[(i, j)], t[(j, j)]);
    // (b, c - a) spans the eigenvector of [[a, b], [0, c]] for c
    let (v1, v2) = (b, c - a);
    let nv = v1.norm().hypot(v2.norm());
    if nv == 0.0 {
        return;
    }
    // Q = [[q11, q12], [q21, q22]] unitary with first column v / |v|
    let (q11, q21) = (v1 / nv, v2 / nv);
    let (q12, q22) = (-q21.conj(), q11.conj());
    for col in 0..t.cols() {
        let x = t[(i, col)];
        let y = t[(j, col)];
        t[(i, col)] = q11.conj() * x + q21.conj() * y;
        t[(j, col)] = q12.conj() * x + q22.conj() * y;
    }
    for m in [&mut *t, &mut *z] {
        for row in 0..m.rows() {
            let x = m[(row, i)];
            let y = m[(row, j)];
            m[(row, i)] = x * q11 + y * q21;
            m[(row, j)] = x * q12 + y * q22;
        }
    }
    t[(j, i)] = ZERO;
}
