use rand::seq::index::sample;
use rand::Rng as _;

use crate::error::{invalid, mismatch, Result};
use crate::numerics::ColumnMatrix;
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;
use crate::sketch::{SketchDescriptor, SketchKind};

/// OSNAP-style `m x n` sparse embedding: every column holds exactly `s`
/// nonzeros at distinct uniformly random rows, each `±1/√s`.
#[derive(Debug, Clone)]
pub struct SparseEmbedding {
    descriptor: SketchDescriptor,
    /// Per column: `(row, sign)` pairs, rows sorted ascending.
    columns: Vec<Vec<(usize, bool)>>,
}

impl SparseEmbedding {
    pub fn new(m: usize, n: usize, s: usize, seed: u64) -> Result<Self> {
        if s == 0 || s > m {
            return Err(invalid(format!("sparsity {s} must lie in [1, {m}]")));
        }
        let mut rng = rng_from_seed(seed);
        let columns = (0..n)
            .map(|_| {
                let mut rows = sample(&mut rng, m, s).into_vec();
                rows.sort_unstable();
                rows.into_iter().map(|r| (r, rng.gen::<bool>())).collect()
            })
            .collect();
        Ok(Self {
            descriptor: SketchDescriptor {
                kind: SketchKind::Sparse,
                rows: m,
                cols: n,
                p: 2.0,
                sparsity: s,
                seed,
                scale: 1.0,
            },
            columns,
        })
    }

    pub fn descriptor(&self) -> &SketchDescriptor {
        &self.descriptor
    }

    pub fn rows(&self) -> usize {
        self.descriptor.rows
    }

    pub fn cols(&self) -> usize {
        self.descriptor.cols
    }

    pub fn sparsity(&self) -> usize {
        self.descriptor.sparsity
    }

    pub fn column_entries(&self, j: usize) -> &[(usize, bool)] {
        &self.columns[j]
    }

    fn value<T: Scalar>(&self) -> T {
        T::one() / T::of(self.sparsity() as f64).sqrt()
    }

    pub fn to_dense<T: Scalar>(&self) -> ColumnMatrix<T> {
        let v: T = self.value();
        let mut out = ColumnMatrix::zeros(self.rows(), self.cols());
        for (j, col) in self.columns.iter().enumerate() {
            for &(r, neg) in col {
                out[(r, j)] = if neg { -v } else { v };
            }
        }
        out
    }

    /// `S A` in `O(nnz(A) s)`.
    pub fn apply<T: Scalar>(&self, a: &ColumnMatrix<T>) -> Result<ColumnMatrix<T>> {
        if a.rows() != self.cols() {
            return Err(mismatch(format!(
                "sparse embedding over {} coordinates applied to {} rows",
                self.cols(),
                a.rows()
            )));
        }
        let v: T = self.value();
        let mut out = ColumnMatrix::zeros(self.rows(), a.cols());
        for j in 0..a.cols() {
            let src = a.col(j);
            let dst = out.col_mut(j);
            for (i, &x) in src.iter().enumerate() {
                if x == T::zero() {
                    continue;
                }
                let xv = x * v;
                for &(r, neg) in &self.columns[i] {
                    dst[r] = if neg { dst[r] - xv } else { dst[r] + xv };
                }
            }
        }
        Ok(out)
    }
}
