use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, mismatch, CssError, Result};
use crate::scalar::Scalar;

/// Dense `rows x cols` matrix stored column-major, addressed column-wise.
///
/// Columns are contiguous slices, which is the access pattern of every
/// algorithm here: columns arrive in streams, get sketched, sampled and
/// projected one at a time.
#[derive(Clone, PartialEq)]
pub struct ColumnMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> ColumnMatrix<T> {
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.cols == 0
    }
}

impl<T: Scalar> ColumnMatrix<T> {
    /// All-zero matrix. Panics if `rows == 0`.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1, "ColumnMatrix needs at least one row");
        Self {
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

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[j * rows + i] = f(i, j);
            }
        }
        m
    }

    /// Builds from column-major storage, validating shape and finiteness.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 {
            return Err(invalid("matrix must have at least one row"));
        }
        if data.len() != rows * cols {
            return Err(mismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(CssError::NonFinite {
                row: pos % rows,
                col: pos / rows,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds from row-major nested slices; handy in tests.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let d = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(mismatch("ragged rows"));
        }
        let mut data = Vec::with_capacity(d * n);
        for j in 0..n {
            for r in rows {
                data.push(r[j]);
            }
        }
        Self::from_col_major(d, n, data)
    }

    /// Builds from a list of equal-length columns. `rows` is needed so that an
    /// empty column list still has a shape.
    pub fn from_columns<C: AsRef<[T]>>(rows: usize, columns: &[C]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(mismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            data.extend_from_slice(c);
        }
        Self::from_col_major(rows, columns.len(), data)
    }


    #[inline]
    pub fn col(&self, j: usize) -> &[T] {
        assert!(j < self.cols, "column {j} out of range ({})", self.cols);
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        assert!(j < self.cols, "column {j} out of range ({})", self.cols);
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.rows).take(self.cols)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn push_column(&mut self, column: &[T]) -> Result<()> {
        if column.len() != self.rows {
            return Err(mismatch(format!(
                "column of length {} pushed onto {} rows",
                column.len(),
                self.rows
            )));
        }
        self.data.extend_from_slice(column);
        self.cols += 1;
        Ok(())
    }

    /// Panics on a matrix without columns, which has no valid transpose.
    pub fn transpose(&self) -> Self {
        assert!(self.cols >= 1, "cannot transpose a matrix with no columns");
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(mismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (l, &b) in rhs.col(j).iter().enumerate() {
                if b == T::zero() {
                    continue;
                }
                for (o, &a) in dst.iter_mut().zip(self.col(l)) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * x` for a vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.col(j)) {
                *o = *o + a * xj;
            }
        }
        out
    }

    pub fn select_columns(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for &j in indices {
            data.extend_from_slice(self.col(j));
        }
        Self {
            rows: self.rows,
            cols: indices.len(),
            data,
        }
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(mismatch(format!(
                "cannot stack {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    pub fn scale_column(&mut self, j: usize, factor: T) {
        for x in self.col_mut(j) {
            *x = *x * factor;
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(mismatch("shapes differ in subtraction"));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn cast<U: Scalar>(&self) -> ColumnMatrix<U> {
        ColumnMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| U::of(x.f64())).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for ColumnMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for ColumnMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl<T: fmt::Debug> fmt::Debug for ColumnMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ColumnMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(12) {
                write!(f, "{:>12.5?} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Exponent of an entrywise norm, restricted to `1 <= p < 2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PNorm(f64);

impl PNorm {
    pub const ONE: PNorm = PNorm(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if (1.0..2.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(invalid(format!("p must lie in [1, 2), got {p}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn get<T: Scalar>(self) -> T {
        T::of(self.0)
    }
}

impl TryFrom<f64> for PNorm {
    type Error = CssError;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PNorm> for f64 {
    fn from(p: PNorm) -> f64 {
        p.0
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty_rows() {
        assert!(ColumnMatrix::<f64>::from_col_major(0, 0, vec![]).is_err());
        let err = ColumnMatrix::from_col_major(2, 1, vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, CssError::NonFinite { row: 1, col: 0 }));
    }

    #[test]
    fn pnorm_range() {
        assert!(PNorm::new(1.0).is_ok());
        assert!(PNorm::new(1.99).is_ok());
        assert!(PNorm::new(2.0).is_err());
        assert!(PNorm::new(0.5).is_err());
    }

    #[test]
    fn matmul_and_transpose() {
        let a = ColumnMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let at = a.transpose();
        let g = at.matmul(&a).unwrap();
        assert_eq!(g[(0, 0)], 35.0);
        assert_eq!(g[(0, 1)], 44.0);
        assert_eq!(g[(1, 1)], 56.0);
        assert_eq!(a.col(1), &[2.0, 4.0, 6.0]);
    }

    #[test]
    #[should_panic]
    fn column_access_out_of_range() {
        let a = ColumnMatrix::<f64>::zeros(2, 2);
        let _ = a.col(2);
    }
}
