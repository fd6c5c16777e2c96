use std::fmt;

use super::{Real, Scalar};
use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<S: Clone> Matrix<S> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries given for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map<T>(&self, f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }


    pub fn matmul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = S::zero();
                for k in 0..self.cols {
                    acc = acc + &(self.get(i, k).clone() * o.get(k, j));
                }
                out.push(acc);
            }
        }
        Ok(Matrix { rows: self.rows, cols: o.cols, data: out })
    }

    /// `a*X + b*Y`.
    pub fn lincomb(a: &S, x: &Self, b: &S, y: &Self) -> Result<Self> {
        if x.rows != y.rows || x.cols != y.cols {
            return Err(Error::Dimension(format!(
                "cannot combine {}x{} and {}x{}",
                x.rows, x.cols, y.rows, y.cols
            )));
        }
        let data = x
            .data
            .iter()
            .zip(&y.data)
            .map(|(p, q)| a.clone() * p + &(b.clone() * q))
            .collect();
        Ok(Matrix { rows: x.rows, cols: x.cols, data })
    }

    pub fn scale(&self, a: &S) -> Self {
        self.map(|x| a.clone() * x)
    }

    /// Solve `self * X = rhs` by LU factorization with partial pivoting.
    pub fn lu_solve(&self, rhs: &Self) -> Result<Self> {
        let n = self.rows;
        if !self.is_square() || rhs.rows != n {
            return Err(Error::Dimension(format!(
                "cannot solve with {}x{} matrix and {}x{} right-hand side",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let m = rhs.cols;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].modulus();
            for i in k + 1..n {
                let v = a[i * n + k].modulus();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if Scalar::is_zero(&a[piv * n + k]) || !best.is_finite() {
                return Err(Error::Singular(format!("zero pivot in column {k}")));
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                for j in 0..m {
                    b.swap(k * m + j, piv * m + j);
                }
            }
            let p = a[k * n + k].clone();
            for i in k + 1..n {
                let l = a[i * n + k].clone() / &p;
                if Scalar::is_zero(&l) {
                    continue;
                }
                for j in k + 1..n {
                    let t = l.clone() * &a[k * n + j];
                    a[i * n + j] = a[i * n + j].clone() - &t;
                }
                for j in 0..m {
                    let t = l.clone() * &b[k * m + j];
                    b[i * m + j] = b[i * m + j].clone() - &t;
                }
            }
        }
        for k in (0..n).rev() {
            for j in 0..m {
                let mut acc = b[k * m + j].clone();
                for i in k + 1..n {
                    acc = acc - &(a[k * n + i].clone() * &b[i * m + j]);
                }
                b[k * m + j] = acc / &a[k * n + k];
            }
        }
        Ok(Matrix { rows: n, cols: m, data: b })
    }

    pub fn frobenius_norm(&self) -> S::Real {
        let mut acc = <S::Real as Real>::from_i64_prec(0, 2);
        for x in &self.data {
            let m = x.modulus();
            acc += m.clone() * &m;
        }
        acc.sqrt()
    }

    /// Spectral norm, via the singular values of the real embedding.
    pub fn norm2(&self) -> S::Real {
        super::svd::singular_values_of(self).into_iter().next().unwrap_or_else(|| <S::Real as Real>::from_i64_prec(0, 2))
    }

    pub fn max_abs(&self) -> S::Real {
        let mut best = <S::Real as Real>::from_i64_prec(0, 2);
        for x in &self.data {
            best = best.max_of(x.modulus());
        }
        best
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Self::lincomb(&S::one(), self, &-S::one(), o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<f64>>) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn product() {
        let a = m(vec![vec![3., 4.], vec![5., 6.]]);
        let a2 = a.matmul(&a).unwrap();
        assert_eq!(a2, m(vec![vec![29., 36.], vec![45., 56.]]));
    }

    #[test]
    fn solve_needs_pivoting() {
        let a = m(vec![vec![0., 1.], vec![1., 0.]]);
        let b = m(vec![vec![2.], vec![3.]]);
        assert_eq!(a.lu_solve(&b).unwrap(), m(vec![vec![3.], vec![2.]]));
    }

    #[test]
    fn singular_is_error() {
        let a = m(vec![vec![1., 2.], vec![2., 4.]]);
        assert!(matches!(a.lu_solve(&Matrix::identity(2)), Err(Error::Singular(_))));
    }

    #[test]
    fn dimension_mismatch() {
        let a = Matrix::<f64>::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
        assert!(Matrix::lincomb(&1.0, &a, &1.0, &Matrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn spectral_norm_diag() {
        let a = m(vec![vec![3., 0.], vec![0., -4.]]);
        assert!((a.norm2() - 4.0).abs() < 1e-14);
    }
}
