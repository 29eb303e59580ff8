//! Dense integer matrices, generic over the scalar type.
//!
//! Everything here is exact arithmetic over an integer domain: [`Mat`] is
//! instantiated with `i64` for small bookkeeping and with `BigInt` (see
//! [`crate::ExactMat`]) wherever entries can grow, [`Mat2`] carries the
//! boundary-torus gluing data.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_integer::Integer;
use num_traits::Signed;

/// Scalar bound for exact matrix arithmetic: an ordered integer domain with
/// truncated division and sign operations.
pub trait IntScalar: Integer + Signed + Clone + fmt::Debug + fmt::Display {}

impl<T> IntScalar for T where T: Integer + Signed + Clone + fmt::Debug + fmt::Display {}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: IntScalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: (0..rows * cols).map(|_| T::zero()).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Mat::<T>::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = self[(i, k)].clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + term;
                }
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)].clone();
        }
    }

    pub fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            self[(i, c)] = -self[(i, c)].clone();
        }
    }

    /// `row[target] += coeff * row[source]`
    pub fn row_axpy(&mut self, target: usize, source: usize, coeff: &T) {
        assert_ne!(target, source);
        for j in 0..self.cols {
            let term = coeff.clone() * self[(source, j)].clone();
            self[(target, j)] = self[(target, j)].clone() + term;
        }
    }

    /// `col[target] += coeff * col[source]`
    pub fn col_axpy(&mut self, target: usize, source: usize, coeff: &T) {
        assert_ne!(target, source);
        for i in 0..self.rows {
            let term = coeff.clone() * self[(i, source)].clone();
            self[(i, target)] = self[(i, target)].clone() + term;
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.clone();
        let mut prev = T::one();
        let mut negate = false;
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        negate = !negate;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[(i, j)].clone() * a[(k, k)].clone()
                        - a[(i, k)].clone() * a[(k, j)].clone();
                    a[(i, j)] = num / prev.clone();
                }
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        if negate {
            -d
        } else {
            d
        }
    }
}

impl<T: IntScalar + From<i64>> Mat<T> {
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| T::from(x)).collect())
                .collect(),
        )
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: IntScalar> fmt::Display for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// 2×2 integer matrix with rows `[[a, b], [c, d]]`.
///
/// Used for torus gluings: the columns are the images of the source basis
/// (μ, λ) expressed in the target basis, so μ ↦ a·μ' + c·λ' and
/// λ ↦ b·μ' + d·λ'.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: IntScalar + Copy> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    /// The plumbing gluing `[[0,1],[1,0]]`: section ↦ fiber, fiber ↦ section.
    pub fn plumbing() -> Self {
        Mat2::new(T::zero(), T::one(), T::one(), T::zero())
    }

    /// The section flip diag(−1, 1): μ ↦ −μ, λ ↦ λ. This is both the cut
    /// regluing along a vertical torus and the basis transport through a
    /// `T² × [−1,1]` buffer (its two boundary circles carry opposite induced
    /// orientations).
    pub fn section_flip() -> Self {
        Mat2::new(-T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, rhs: &Mat2<T>) -> Mat2<T> {
        Mat2::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    /// Inverse of a unimodular matrix; `None` when det ∉ {±1}.
    pub fn inverse_unimodular(&self) -> Option<Mat2<T>> {
        let det = self.det();
        let adj = Mat2::new(self.d, -self.b, -self.c, self.a);
        if det.is_one() {
            Some(adj)
        } else if (-det).is_one() {
            Some(Mat2::new(-adj.a, -adj.b, -adj.c, -adj.d))
        } else {
            None
        }
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    pub fn is_plumbing(&self) -> bool {
        *self == Mat2::plumbing()
    }
}

impl<T: fmt::Display> fmt::Display for Mat2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn bareiss_determinant_matches_small_cases() {
        let m = Mat::<i64>::from_rows(vec![vec![2, 1], vec![1, 1]]);
        assert_eq!(m.det(), 1);
        let m = Mat::<i64>::from_rows(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(m.det(), -1);
        let m = Mat::<BigInt>::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        assert_eq!(m.det(), BigInt::from(-3));
        let singular = Mat::<i64>::from_rows(vec![vec![1, 2], vec![2, 4]]);
        assert_eq!(singular.det(), 0);
    }

    #[test]
    fn mat2_inverse_composes_to_identity() {
        let g = Mat2::new(-1i64, 0, 5, 1);
        assert_eq!(g.det(), -1);
        let inv = g.inverse_unimodular().unwrap();
        assert_eq!(g.mul(&inv), Mat2::identity());
        assert_eq!(inv.mul(&g), Mat2::identity());
        assert!(Mat2::new(2i64, 0, 0, 1).inverse_unimodular().is_none());
    }

    #[test]
    fn buffer_transport_squares_to_identity() {
        let f = Mat2::<i64>::section_flip();
        assert_eq!(f.mul(&f), Mat2::identity());
        assert_eq!(f.det(), -1);
    }
}
