//! Dense matrices and the LDLᵀ factorization used for Gram forms.

use std::fmt;

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.data.chunks(self.cols.max(1)).take(self.rows))
            .finish()
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from rows; panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    /// `self · v` for an integer vector.
    pub fn mul_int_vec(&self, v: &[i64]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, &n)| acc + a.clone() * T::from_int(n))
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out: Matrix<T> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        out
    }

    /// Quadratic form `nᵀ M n` on an integer vector.
    pub fn quadratic_int(&self, n: &[i64]) -> T {
        dot_int(n, &self.mul_int_vec(n))
    }

    /// LDLᵀ factorization of a symmetric matrix, `None` if a pivot vanishes.
    pub fn ldl(&self) -> Option<Ldl<T>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut l: Matrix<T> = Matrix::identity(n);
        let mut d: Vec<T> = Vec::with_capacity(n);
        for j in 0..n {
            let mut dj = self[(j, j)].clone();
            for k in 0..j {
                dj = dj - l[(j, k)].clone() * l[(j, k)].clone() * d[k].clone();
            }
            if dj.is_zero() {
                return None;
            }
            for i in j + 1..n {
                let mut s = self[(i, j)].clone();
                for k in 0..j {
                    s = s - l[(i, k)].clone() * l[(j, k)].clone() * d[k].clone();
                }
                l[(i, j)] = s / dj.clone();
            }
            d.push(dj);
        }
        Some(Ldl { l, d })
    }

    /// Leading principal minors, computed by fraction-free elimination.
    pub fn leading_minors(&self) -> Vec<T> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut minors = Vec::with_capacity(n);
        let mut prev = T::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                // a zero minor stops the Bareiss recurrence; recompute the rest directly
                minors.push(T::zero());
                for m in k + 1..n {
                    minors.push(self.submatrix(m + 1).determinant());
                }
                return minors;
            }
            minors.push(a[(k, k)].clone());
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a[(i, j)].clone() * a[(k, k)].clone()
                        - a[(i, k)].clone() * a[(k, j)].clone())
                        / prev.clone();
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        minors
    }

    fn submatrix(&self, k: usize) -> Matrix<T> {
        Matrix::from_rows((0..k).map(|i| self.row(i)[..k].to_vec()).collect())
    }

    /// Determinant by Gaussian elimination with nonzero pivoting.
    pub fn determinant(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[(i, k)].is_zero()) else {
                return T::zero();
            };
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[(k, k)].clone();
            det = det * pivot.clone();
            for i in k + 1..n {
                let f = a[(i, k)].clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                }
            }
        }
        det
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// `G = L·diag(d)·Lᵀ` with `L` unit lower-triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct Ldl<T> {
    pub l: Matrix<T>,
    pub d: Vec<T>,
}

impl<T: Scalar> Ldl<T> {
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.d.iter().all(|p| p.is_positive())
    }

    /// Solves `L D Lᵀ x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] = y[i].clone() - self.l[(i, k)].clone() * y[k].clone();
            }
        }
        for i in 0..n {
            y[i] = y[i].clone() / self.d[i].clone();
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] = y[i].clone() - self.l[(k, i)].clone() * y[k].clone();
            }
        }
        y
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn dot_int<T: Scalar>(n: &[i64], v: &[T]) -> T {
    assert_eq!(n.len(), v.len());
    n.iter()
        .zip(v)
        .filter(|(&k, _)| k != 0)
        .fold(T::zero(), |acc, (&k, x)| acc + T::from_int(k) * x.clone())
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale<T: Scalar>(c: &T, a: &[T]) -> Vec<T> {
    a.iter().map(|x| c.clone() * x.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};
    use num_rational::BigRational;

    fn theta_gram() -> Matrix<BigRational> {
        Matrix::from_rows(vec![vec![rat(2), rat(1)], vec![rat(1), rat(2)]])
    }

    #[test]
    fn ldl_reconstructs() {
        let g = Matrix::from_rows(vec![
            vec![rat(4), rat(2), rat(-2)],
            vec![rat(2), rat(5), ratio(1, 2)],
            vec![rat(-2), ratio(1, 2), rat(7)],
        ]);
        let f = g.ldl().unwrap();
        let mut dl = f.l.clone();
        for i in 0..3 {
            for j in 0..3 {
                dl[(i, j)] = f.l[(i, j)].clone() * f.d[j].clone();
            }
        }
        assert_eq!(dl.mul(&f.l.transpose()), g);
        assert!(f.is_positive_definite());
    }

    #[test]
    fn solve_theta_gram() {
        let f = theta_gram().ldl().unwrap();
        // G⁻¹ (1, 1) = (1/3, 1/3)
        assert_eq!(f.solve(&[rat(1), rat(1)]), vec![ratio(1, 3), ratio(1, 3)]);
        assert_eq!(f.d, vec![rat(2), ratio(3, 2)]);
    }

    #[test]
    fn minors_and_determinant() {
        let g = theta_gram();
        assert_eq!(g.leading_minors(), vec![rat(2), rat(3)]);
        assert_eq!(g.determinant(), rat(3));
        let singular = Matrix::from_rows(vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]]);
        assert_eq!(singular.leading_minors(), vec![rat(0), rat(-1)]);
        assert!(singular.ldl().is_none());
    }

    #[test]
    fn float_kernel_agrees() {
        let g = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let x = g.ldl().unwrap().solve(&[1.0, 1.0]);
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-12 && (x[1] - 1.0 / 3.0).abs() < 1e-12);
    }
}
