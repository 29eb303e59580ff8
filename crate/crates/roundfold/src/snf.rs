//! Smith normal form of integer matrices with transform tracking.
//!
//! `U · A · V = D` with `U`, `V` unimodular and `D` diagonal satisfying the
//! divisibility chain `d_1 | d_2 | …`. The reduction is the classical one:
//! pick the minimum-magnitude pivot, clear its row and column by division
//! with remainder, and repair divisibility by folding offending entries into
//! the pivot row before moving on.

use crate::mat::{IntScalar, Mat};

#[derive(Clone, Debug)]
pub struct SmithNormalForm<T> {
    /// Diagonal matrix, same shape as the input.
    pub d: Mat<T>,
    /// Left transform, `rows × rows`, det ±1.
    pub u: Mat<T>,
    /// Right transform, `cols × cols`, det ±1.
    pub v: Mat<T>,
}

impl<T: IntScalar> SmithNormalForm<T> {
    /// Nonzero diagonal entries, in chain order.
    pub fn invariant_factors(&self) -> Vec<T> {
        self.d
            .diagonal()
            .into_iter()
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form<T: IntScalar>(a: &Mat<T>) -> SmithNormalForm<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Mat::identity(m);
    let mut v = Mat::identity(n);

    for k in 0..m.min(n) {
        'pivot: loop {
            let Some((pi, pj)) = min_abs_entry(&d, k) else {
                // remaining submatrix is zero
                return finish(d, u, v);
            };
            d.swap_rows(k, pi);
            u.swap_rows(k, pi);
            d.swap_cols(k, pj);
            v.swap_cols(k, pj);
            if d[(k, k)].is_negative() {
                d.negate_row(k);
                u.negate_row(k);
            }

            let mut clean = true;
            for i in k + 1..m {
                if d[(i, k)].is_zero() {
                    continue;
                }
                let q = -(d[(i, k)].clone() / d[(k, k)].clone());
                d.row_axpy(i, k, &q);
                u.row_axpy(i, k, &q);
                if !d[(i, k)].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..n {
                if d[(k, j)].is_zero() {
                    continue;
                }
                let q = -(d[(k, j)].clone() / d[(k, k)].clone());
                d.col_axpy(j, k, &q);
                v.col_axpy(j, k, &q);
                if !d[(k, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }

            // pivot divides everything below and to the right, or fold the
            // offending row into row k and retry
            for i in k + 1..m {
                for j in k + 1..n {
                    if !d[(i, j)].mod_floor(&d[(k, k)]).is_zero() {
                        let one = T::one();
                        d.row_axpy(k, i, &one);
                        u.row_axpy(k, i, &one);
                        continue 'pivot;
                    }
                }
            }
            break;
        }
    }
    finish(d, u, v)
}

fn finish<T: IntScalar>(d: Mat<T>, u: Mat<T>, v: Mat<T>) -> SmithNormalForm<T> {
    let snf = SmithNormalForm { d, u, v };
    debug_assert!(verify(&snf), "smith normal form self-check failed");
    snf
}

/// Minimum-magnitude nonzero entry of the trailing submatrix starting at
/// (k, k), if any.
fn min_abs_entry<T: IntScalar>(d: &Mat<T>, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..d.rows() {
        for j in k..d.cols() {
            if d[(i, j)].is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d[(bi, bj)].abs() <= d[(i, j)].abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Check the full contract against the original matrix recovered from the
/// transforms: diagonal, nonnegative, divisibility chain, and unimodular
/// transforms. Used by tests and debug assertions.
pub fn verify_against<T: IntScalar>(a: &Mat<T>, snf: &SmithNormalForm<T>) -> bool {
    snf.u.mul(a).mul(&snf.v) == snf.d && verify(snf)
}

fn verify<T: IntScalar>(snf: &SmithNormalForm<T>) -> bool {
    let d = &snf.d;
    for i in 0..d.rows() {
        for j in 0..d.cols() {
            if i != j && !d[(i, j)].is_zero() {
                return false;
            }
        }
    }
    let diag = d.diagonal();
    for w in diag.windows(2) {
        if w[0].is_negative() || w[1].is_negative() {
            return false;
        }
        if w[0].is_zero() && !w[1].is_zero() {
            return false;
        }
        if !w[0].is_zero() && !w[1].mod_floor(&w[0]).is_zero() {
            return false;
        }
    }
    snf.u.det().abs().is_one() && snf.v.det().abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn snf_i64(rows: &[&[i64]]) -> SmithNormalForm<BigInt> {
        let a = Mat::<BigInt>::from_i64_rows(rows);
        let s = smith_normal_form(&a);
        assert!(verify_against(&a, &s));
        s
    }

    #[test]
    fn zero_matrix_yields_identity_transforms() {
        let a = Mat::<BigInt>::zeros(3, 2);
        let s = smith_normal_form(&a);
        assert!(s.d.is_zero());
        assert!(s.u.is_identity());
        assert!(s.v.is_identity());
    }

    #[test]
    fn diag_2_3_has_invariant_factors_1_6() {
        // elementary-operations oracle by hand:
        // [[2,0],[0,3]] ~ [[2,3],[0,3]] ~ [[2,1],[0,3]] -> pivot 1 -> diag(1,6)
        let s = snf_i64(&[&[2, 0], &[0, 3]]);
        assert_eq!(
            s.invariant_factors(),
            vec![BigInt::from(1), BigInt::from(6)]
        );
    }

    #[test]
    fn known_4x4_factors() {
        let s = snf_i64(&[
            &[-6, 111, -36, 6],
            &[5, -672, 210, 74],
            &[0, -255, 81, 24],
            &[-7, 255, -81, -10],
        ]);
        assert_eq!(
            s.invariant_factors(),
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(21)]
        );
    }

    #[test]
    fn rank_deficient_rectangular() {
        let s = snf_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1)]);
        assert_eq!(s.rank(), 1);
    }
}
