//! Minors, the k-multiplicative compound `A^(k)`, and parallelotope volumes.
//!
//! Entry `(i, j)` of `A^(k)` is the minor `A(alpha^i | beta^j)` where `alpha^i`
//! and `beta^j` are the `i`-th and `j`-th tuples of `Q(k, rows)` and
//! `Q(k, cols)`. By Cauchy-Binet, `(AB)^(k) = A^(k) B^(k)`.

use crate::combinat::{KIndexer, KTuple};
use crate::error::{Error, Result};
use crate::linalg::{rank_floor, singular_values};
use crate::matrix::{Lu, Matrix, C64};
use crate::options::RankTol;

/// `A^(k)` together with the indexers of its rows and columns.
#[derive(Debug, Clone)]
pub struct CompoundMatrix {
    pub base_rows: usize,
    pub base_cols: usize,
    pub order: usize,
    pub matrix: Matrix,
    pub row_index: KIndexer,
    pub col_index: KIndexer,
}

impl CompoundMatrix {
    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

/// Determinant of the square submatrix `A[rows | cols]`.
pub fn minor(a: &Matrix, rows: &KTuple, cols: &KTuple) -> Result<C64> {
    if rows.len() != cols.len() {
        return Err(Error::Shape {
            op: "minor",
            detail: format!("row tuple {rows} and column tuple {cols} differ in length"),
        });
    }
    let out_of_range = rows.entries().iter().any(|&r| r > a.rows())
        || cols.entries().iter().any(|&c| c > a.cols());
    if out_of_range {
        return Err(Error::Shape {
            op: "minor",
            detail: format!(
                "tuples {rows}|{cols} exceed a {}x{} matrix",
                a.rows(),
                a.cols()
            ),
        });
    }
    Ok(minor_unchecked(a, rows, cols))
}

fn minor_unchecked(a: &Matrix, rows: &KTuple, cols: &KTuple) -> C64 {
    let r: Vec<usize> = rows.zero_based().collect();
    let c: Vec<usize> = cols.zero_based().collect();
    match r.len() {
        1 => a[(r[0], c[0])],
        2 => a[(r[0], c[0])] * a[(r[1], c[1])] - a[(r[0], c[1])] * a[(r[1], c[0])],
        _ => Lu::factor(&a.select(&r, &c)).det(),
    }
}

/// The k-multiplicative compound of `a`, of shape `C(rows, k) x C(cols, k)`.
pub fn kcompound(a: &Matrix, k: usize) -> Result<CompoundMatrix> {
    let (n, m) = a.shape();
    if k < 1 || k > n.min(m) {
        return Err(Error::InvalidOrder { k, n: n.min(m) });
    }
    let row_index = KIndexer::enumerate(n, k)?;
    let col_index = KIndexer::enumerate(m, k)?;
    let mut out = Matrix::zeros(row_index.len(), col_index.len());
    for (i, rt) in row_index.tuples().iter().enumerate() {
        for (j, ct) in col_index.tuples().iter().enumerate() {
            out[(i, j)] = minor_unchecked(a, rt, ct);
        }
    }
    Ok(CompoundMatrix {
        base_rows: n,
        base_cols: m,
        order: k,
        matrix: out,
        row_index,
        col_index,
    })
}

/// Shorthand for `kcompound(a, k)?.matrix`.
pub(crate) fn compound_of(a: &Matrix, k: usize) -> Result<Matrix> {
    Ok(kcompound(a, k)?.matrix)
}

/// The wedge `[x^1 ... x^k]^(k)` of `k` column vectors, a `C(n, k)` vector.
pub fn wedge(columns: &[Vec<C64>]) -> Result<Vec<C64>> {
    let k = columns.len();
    let n = columns.first().map_or(0, |c| c.len());
    let x = Matrix::from_columns(n, columns);
    Ok(compound_of(&x, k)?.col(0))
}

/// Volume of the parallelotope spanned by the columns of `x` (n x k, k <= n),
/// computed as the Euclidean norm of `x^(k)`.
pub fn volume(x: &Matrix) -> Result<f64> {
    let (n, k) = x.shape();
    if k == 0 || k > n {
        return Err(Error::Shape {
            op: "volume",
            detail: format!("need 1 <= k <= n for edge matrix {n}x{k}"),
        });
    }
    let y = compound_of(x, k)?;
    Ok(y.norm_fro())
}

/// `sigma_max(A)^k`, an upper bound on `|A^(k)|_2` and the natural scale for
/// zero tests on the entries of `A^(k)`.
pub fn compound_scale(a: &Matrix, k: usize) -> f64 {
    singular_values(a)
        .first()
        .copied()
        .unwrap_or(0.0)
        .powi(k as i32)
}

/// Numerical rank of `A^(k)`, with the threshold measured against
/// `sigma_max(A)^k` rather than the norm of the computed compound. When
/// `k > rank(A)` every entry of `A^(k)` is rounding noise, and a threshold
/// relative to the noise itself would count it as rank.
pub fn compound_rank(a: &Matrix, k: usize, tol: RankTol) -> Result<usize> {
    let ak = compound_of(a, k)?;
    Ok(rank_floor(&ak, tol, compound_scale(a, k)))
}

/// `A*`; compounds commute with it: `(A*)^(k) = (A^(k))*`.
pub fn conjugate_transpose(a: &Matrix) -> Matrix {
    a.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::svd;
    use crate::options::RankTol;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random(rng: &mut ChaCha8Rng, r: usize, cc: usize, complex: bool) -> Matrix {
        let data = (0..r * cc)
            .map(|_| {
                let im = if complex {
                    rng.random_range(-1.0..1.0)
                } else {
                    0.0
                };
                C64::new(rng.random_range(-1.0..1.0), im)
            })
            .collect();
        Matrix::new(r, cc, data).unwrap()
    }

    /// Determinant by permutation sum, independent of LU.
    fn det_permutations(a: &Matrix) -> C64 {
        fn rec(a: &Matrix, row: usize, used: &mut Vec<bool>, sign: f64, acc: C64, out: &mut C64) {
            let n = a.rows();
            if row == n {
                *out += acc * sign;
                return;
            }
            for j in 0..n {
                if used[j] {
                    continue;
                }
                // parity: count used columns to the right of j
                let inversions = used[j + 1..].iter().filter(|&&u| u).count();
                let s = if inversions % 2 == 0 { sign } else { -sign };
                used[j] = true;
                rec(a, row + 1, used, s, acc * a[(row, j)], out);
                used[j] = false;
            }
        }
        let mut out = C64::new(0.0, 0.0);
        rec(
            a,
            0,
            &mut vec![false; a.cols()],
            1.0,
            C64::new(1.0, 0.0),
            &mut out,
        );
        out
    }

    #[test]
    fn permutation_oracle_sanity() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert!((det_permutations(&a) - c(-2.0)).norm() < 1e-15);
        let p = Matrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
        assert!((det_permutations(&p) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn minor_of_generic_3x3() {
        let a = Matrix::from_rows(&[[2.0, 3.0, 5.0], [7.0, 11.0, 13.0], [17.0, 19.0, 23.0]]);
        let r = KTuple::new(vec![1, 2], 3).unwrap();
        let cc = KTuple::new(vec![1, 3], 3).unwrap();
        // a11 a23 - a13 a21
        let expect = 2.0 * 13.0 - 5.0 * 7.0;
        assert!((minor(&a, &r, &cc).unwrap() - c(expect)).norm() < 1e-13);
    }

    #[test]
    fn one_by_one_minors_are_entries() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        for i in 1..=2 {
            for j in 1..=2 {
                let m = minor(
                    &a,
                    &KTuple::new(vec![i], 2).unwrap(),
                    &KTuple::new(vec![j], 2).unwrap(),
                );
                assert_eq!(m.unwrap(), a[(i - 1, j - 1)]);
            }
        }
    }

    #[test]
    fn minor_shape_errors() {
        let a = Matrix::zeros(2, 2);
        let r = KTuple::new(vec![1, 2], 2).unwrap();
        let cc = KTuple::new(vec![1], 2).unwrap();
        assert!(minor(&a, &r, &cc).is_err());
        let big = KTuple::new(vec![1, 3], 3).unwrap();
        assert!(minor(&a, &big, &big).is_err());
    }

    #[test]
    fn minors_match_permutation_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random(&mut rng, 5, 5, true);
        for k in 1..=5 {
            let ix = KIndexer::enumerate(5, k).unwrap();
            for rt in ix.tuples().iter().step_by(3) {
                for ct in ix.tuples().iter().step_by(2) {
                    let r: Vec<usize> = rt.zero_based().collect();
                    let cc: Vec<usize> = ct.zero_based().collect();
                    let oracle = det_permutations(&a.select(&r, &cc));
                    let got = minor(&a, rt, ct).unwrap();
                    assert!((got - oracle).norm() < 1e-12, "k={k} {rt}|{ct}");
                }
            }
        }
    }

    #[test]
    fn diag_example_second_compound() {
        let a = Matrix::diag_real(&[0.0, 1.0, 2.0]);
        let a2 = kcompound(&a, 2).unwrap().matrix;
        assert_eq!(a2, Matrix::diag_real(&[0.0, 0.0, 2.0]));
    }

    #[test]
    fn identity_compounds_to_identity() {
        for n in 1..=5 {
            for k in 1..=n {
                let ik = kcompound(&Matrix::identity(n), k).unwrap().matrix;
                assert_eq!(ik, Matrix::identity(crate::binomial(n, k)));
            }
        }
    }

    #[test]
    fn rectangular_compound_against_minor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random(&mut rng, 4, 3, false);
        let cm = kcompound(&a, 2).unwrap();
        assert_eq!(cm.matrix.shape(), (6, 3));
        for i in 0..6 {
            for j in 0..3 {
                let r: Vec<usize> = cm.row_index.tuple(i).zero_based().collect();
                let cc: Vec<usize> = cm.col_index.tuple(j).zero_based().collect();
                let oracle = det_permutations(&a.select(&r, &cc));
                assert!((cm.matrix[(i, j)] - oracle).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn first_and_last_compounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random(&mut rng, 4, 4, true);
        assert_eq!(kcompound(&a, 1).unwrap().matrix, a);
        let d = kcompound(&a, 4).unwrap().matrix;
        assert_eq!(d.shape(), (1, 1));
        assert!((d[(0, 0)] - det_permutations(&a)).norm() < 1e-13);
    }

    #[test]
    fn invalid_orders() {
        let a = Matrix::zeros(3, 2);
        assert!(matches!(kcompound(&a, 0), Err(Error::InvalidOrder { .. })));
        assert!(matches!(kcompound(&a, 3), Err(Error::InvalidOrder { .. })));
    }

    #[test]
    fn volumes() {
        let x = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]);
        assert!((volume(&x).unwrap() - 1.0).abs() < 1e-15);
        // 2D cross product: |3*2 - 0.5*1|
        let x = Matrix::from_rows(&[[3.0, 1.0], [0.5, 2.0], [0.0, 0.0]]);
        assert!((volume(&x).unwrap() - 5.5).abs() < 1e-14);
        let sq = Matrix::from_rows(&[[2.0, 1.0, 0.0], [0.0, 3.0, 1.0], [1.0, 0.0, 1.0]]);
        let d = sq.det().unwrap().norm();
        assert!((volume(&sq).unwrap() - d).abs() < 1e-13);
        assert!(volume(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn volume_matches_gram_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let x = random(&mut rng, 5, 3, false);
            let gram = &x.transpose() * &x;
            let g = det_permutations(&gram).re;
            assert!((volume(&x).unwrap() - g.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn compound_commutes_with_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random(&mut rng, 4, 3, true);
        for k in 1..=3 {
            let lhs = kcompound(&conjugate_transpose(&a), k).unwrap().matrix;
            let rhs = conjugate_transpose(&kcompound(&a, k).unwrap().matrix);
            assert!((&lhs - &rhs).max_abs() < 1e-14);
        }
        let real = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(conjugate_transpose(&real), real.transpose());
        assert_eq!(
            conjugate_transpose(&Matrix::identity(3)),
            Matrix::identity(3)
        );
    }

    #[test]
    fn upper_triangular_diagonal_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut t = random(&mut rng, 4, 4, true);
        for i in 0..4 {
            for j in 0..i {
                t[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        for k in 1..=4 {
            let cm = kcompound(&t, k).unwrap();
            assert!(cm.matrix.is_upper_triangular(0.0), "k={k}");
            for i in 0..cm.matrix.rows() {
                let prod: C64 = cm
                    .row_index
                    .tuple(i)
                    .zero_based()
                    .map(|a| t[(a, a)])
                    .product();
                assert!((cm.matrix[(i, i)] - prod).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn unitary_and_inverse_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random(&mut rng, 4, 4, true);
        let u = svd(&a).u;
        let inv = a.inverse().unwrap();
        for k in 1..=4 {
            let uk = kcompound(&u, k).unwrap().matrix;
            let r = uk.rows();
            assert!((&(&uk.adjoint() * &uk) - &Matrix::identity(r)).max_abs() < 1e-12);
            let ak = kcompound(&a, k).unwrap().matrix;
            let invk = kcompound(&inv, k).unwrap().matrix;
            assert!((&(&ak * &invk) - &Matrix::identity(r)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn rank_law_on_low_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for l in 0..=4 {
            let left = random(&mut rng, 5, l.max(1), false);
            let right = random(&mut rng, l.max(1), 4, false);
            let a = if l == 0 {
                Matrix::zeros(5, 4)
            } else {
                &left * &right
            };
            for k in 1..=4 {
                assert_eq!(
                    compound_rank(&a, k, RankTol::Default).unwrap(),
                    crate::binomial(l, k) as usize,
                    "l={l} k={k}"
                );
            }
        }
    }

    #[test]
    fn wedge_of_columns() {
        let e1 = vec![c(1.0), c(0.0), c(0.0)];
        let e3 = vec![c(0.0), c(0.0), c(1.0)];
        assert_eq!(wedge(&[e1, e3]).unwrap(), vec![c(0.0), c(1.0), c(0.0)]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn mat(r: usize, cc: usize) -> impl Strategy<Value = Matrix> {
            proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), r * cc).prop_map(move |v| {
                Matrix::new(r, cc, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn cauchy_binet(a in mat(4, 3), b in mat(3, 5), k in 1usize..=3) {
                let ab = kcompound(&(&a * &b), k).unwrap().matrix;
                let prod = &kcompound(&a, k).unwrap().matrix * &kcompound(&b, k).unwrap().matrix;
                prop_assert!((&ab - &prod).max_abs() < 1e-10 * (1.0 + ab.max_abs()));
            }
        }
    }
}
