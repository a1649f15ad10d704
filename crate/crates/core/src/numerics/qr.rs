//! Householder QR with column pivoting.

use crate::numerics::ColumnMatrix;
use crate::scalar::Scalar;

/// Packed pivoted QR factorization `A P = Q R`.
///
/// Reflector `k` is `I - tau_k v_k v_kᵀ` with `v_k[k] = 1` and the remaining
/// entries stored below the diagonal of `packed`.
#[derive(Debug, Clone)]
pub struct PivotedQr<T> {
    packed: ColumnMatrix<T>,
    tau: Vec<T>,
    perm: Vec<usize>,
    rank: usize,
}

/// `max(d, n) * eps * scale`, the cutoff under which a pivot counts as zero.
pub fn rank_threshold<T: Scalar>(rows: usize, cols: usize, scale: T) -> T {
    T::of(rows.max(cols) as f64) * T::epsilon() * scale
}

fn norm2<T: Scalar>(x: &[T]) -> T {
    // Scaled accumulation: entries of the synthetic datasets span ~1e5.
    let scale = x.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    let s: T = x.iter().map(|&v| (v / scale) * (v / scale)).sum();
    scale * s.sqrt()
}

impl<T: Scalar> PivotedQr<T> {
    pub fn new(a: &ColumnMatrix<T>) -> Self {
        let (m, n) = a.shape();
        let mut packed = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut tau = Vec::with_capacity(steps);
        let mut threshold = T::zero();
        let mut rank = 0;

        for k in 0..steps {
            // Pivot: remaining column with the largest trailing norm.
            let (mut best, mut best_norm) = (k, -T::one());
            for j in k..n {
                let nj = norm2(&packed.col(j)[k..]);
                if nj > best_norm {
                    best = j;
                    best_norm = nj;
                }
            }
            if k == 0 {
                threshold = rank_threshold(m, n, best_norm);
            }
            if best_norm <= threshold || best_norm == T::zero() {
                break;
            }
            if best != k {
                perm.swap(k, best);
                for i in 0..m {
                    let tmp = packed[(i, k)];
                    packed[(i, k)] = packed[(i, best)];
                    packed[(i, best)] = tmp;
                }
            }

            let x0 = packed[(k, k)];
            let beta = if x0 >= T::zero() { -best_norm } else { best_norm };
            let denom = x0 - beta;
            let t = (beta - x0) / beta;
            {
                let col = packed.col_mut(k);
                for v in &mut col[k + 1..] {
                    *v = *v / denom;
                }
                col[k] = beta;
            }
            tau.push(t);
            rank += 1;

            for j in k + 1..n {
                let mut dot = packed[(k, j)];
                for i in k + 1..m {
                    dot = dot + packed[(i, k)] * packed[(i, j)];
                }
                let s = t * dot;
                if s == T::zero() {
                    continue;
                }
                packed[(k, j)] = packed[(k, j)] - s;
                for i in k + 1..m {
                    let vik = packed[(i, k)];
                    packed[(i, j)] = packed[(i, j)] - s * vik;
                }
            }
        }

        Self {
            packed,
            tau,
            perm,
            rank,
        }
    }

    /// Numerical rank detected during factorization.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Diagonal of `R` up to the numerical rank.
    pub fn r_diagonal(&self) -> Vec<T> {
        (0..self.rank).map(|k| self.packed[(k, k)]).collect()
    }

    fn apply_reflector(&self, k: usize, x: &mut [T]) {
        let v = &self.packed.col(k)[k + 1..];
        let dot = v.iter().zip(&x[k + 1..]).fold(x[k], |acc, (&a, &b)| acc + a * b);
        let s = self.tau[k] * dot;
        if s == T::zero() {
            return;
        }
        x[k] = x[k] - s;
        for (xi, &vi) in x[k + 1..].iter_mut().zip(v) {
            *xi = *xi - s * vi;
        }
    }

    /// Overwrites `x` with `Qᵀ x`.
    pub fn apply_qt(&self, x: &mut [T]) {
        for k in 0..self.rank {
            self.apply_reflector(k, x);
        }
    }

    /// Orthonormal basis of the column span: the first `rank` columns of `Q`.
    pub fn basis(&self) -> ColumnMatrix<T> {
        let m = self.packed.rows();
        let mut q = ColumnMatrix::zeros(m, self.rank);
        for c in 0..self.rank {
            let col = q.col_mut(c);
            col[c] = T::one();
            for k in (0..self.rank).rev() {
                self.apply_reflector(k, col);
            }
        }
        q
    }

    /// Basic least-squares solution of `min ||A x - y||_2`; free variables
    /// beyond the numerical rank are set to zero.
    pub fn solve_least_squares(&self, y: &[T]) -> Vec<T> {
        let n = self.packed.cols();
        let mut c = y.to_vec();
        self.apply_qt(&mut c);
        let r = self.rank;
        let mut z = vec![T::zero(); r];
        for i in (0..r).rev() {
            let mut acc = c[i];
            for (j, &zj) in z.iter().enumerate().skip(i + 1) {
                acc = acc - self.packed[(i, j)] * zj;
            }
            z[i] = acc / self.packed[(i, i)];
        }
        let mut x = vec![T::zero(); n];
        for (j, zj) in z.into_iter().enumerate() {
            x[self.perm[j]] = zj;
        }
        x
    }
}

/// Orthonormal basis of `colspan(a)`; zero columns when `a` is zero.
pub fn orthonormal_basis<T: Scalar>(a: &ColumnMatrix<T>) -> ColumnMatrix<T> {
    PivotedQr::new(a).basis()
}

pub fn numerical_rank<T: Scalar>(a: &ColumnMatrix<T>) -> usize {
    PivotedQr::new(a).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> ColumnMatrix<f64> {
        let mut s = seed;
        ColumnMatrix::from_fn(rows, cols, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn basis_is_orthonormal_and_spans() {
        let a = lcg_matrix(7, 4, 3);
        let q = orthonormal_basis(&a);
        assert_eq!(q.cols(), 4);
        let g = q.transpose().matmul(&q).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - e).abs() < 1e-12);
            }
        }
        // a = Q Qᵀ a
        let back = q.matmul(&q.transpose().matmul(&a).unwrap()).unwrap();
        assert!(back.sub(&a).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn detects_rank_deficiency() {
        let a = lcg_matrix(6, 2, 9);
        let mut cols: Vec<Vec<f64>> = a.columns().map(|c| c.to_vec()).collect();
        let combo: Vec<f64> = cols[0].iter().zip(&cols[1]).map(|(x, y)| 2.0 * x - y).collect();
        cols.push(combo);
        cols.push(vec![0.0; 6]);
        let b = ColumnMatrix::from_columns(6, &cols).unwrap();
        assert_eq!(numerical_rank(&b), 2);
        assert_eq!(numerical_rank(&ColumnMatrix::<f64>::zeros(3, 3)), 0);
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        let a = lcg_matrix(10, 3, 5);
        let y: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        let x = PivotedQr::new(&a).solve_least_squares(&y);
        // residual orthogonal to the columns
        let fit = a.mul_vec(&x);
        let r: Vec<f64> = y.iter().zip(&fit).map(|(a, b)| a - b).collect();
        for c in a.columns() {
            let dot: f64 = c.iter().zip(&r).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-12);
        }
    }
}
