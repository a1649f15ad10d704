//! Subspace costs, leverage scores, pseudoinverse and the SVD baseline.

use crate::error::{mismatch, invalid, Result};
use crate::numerics::norms::{entrywise_lp_norm, l2, lp_of_values};
use crate::numerics::qr::{orthonormal_basis, rank_threshold};
use crate::numerics::svd::Svd;
use crate::numerics::{ColumnMatrix, PNorm};
use crate::scalar::Scalar;

/// Removes from `x` its component in `span(q)`; `q` must be orthonormal.
/// Two passes of classical Gram-Schmidt.
pub fn remove_projection<T: Scalar>(q: &ColumnMatrix<T>, x: &mut [T]) {
    for _ in 0..2 {
        for c in q.columns() {
            let coef: T = c.iter().zip(x.iter()).map(|(&a, &b)| a * b).sum();
            if coef == T::zero() {
                continue;
            }
            for (xi, &ci) in x.iter_mut().zip(c) {
                *xi = *xi - coef * ci;
            }
        }
    }
}

/// Euclidean distance of every column of `a` to `span(q)`, `q` orthonormal.
pub fn residual_norms<T: Scalar>(q: &ColumnMatrix<T>, a: &ColumnMatrix<T>) -> Vec<T> {
    a.columns()
        .map(|c| {
            let mut r = c.to_vec();
            remove_projection(q, &mut r);
            l2(&r)
        })
        .collect()
}

/// `min_V ||U V - A||_{p,2}`, evaluated exactly: the cost splits over
/// columns, and each column's best fit is its orthogonal projection onto
/// `colspan(U)`.
pub fn projection_cost_p2<T: Scalar>(
    u: &ColumnMatrix<T>,
    a: &ColumnMatrix<T>,
    p: PNorm,
) -> Result<T> {
    if u.rows() != a.rows() {
        return Err(mismatch(format!(
            "U has {} rows, A has {}",
            u.rows(),
            a.rows()
        )));
    }
    let q = orthonormal_basis(u);
    Ok(lp_of_values(residual_norms(&q, a).into_iter(), p))
}

/// Statistical leverage scores of the rows of `a`: squared row norms of an
/// orthonormal basis for its column span.
pub fn leverage_scores<T: Scalar>(a: &ColumnMatrix<T>) -> Vec<T> {
    let q = orthonormal_basis(a);
    let mut scores = vec![T::zero(); a.rows()];
    for c in q.columns() {
        for (s, &x) in scores.iter_mut().zip(c) {
            *s = *s + x * x;
        }
    }
    scores
}

/// Moore-Penrose pseudoinverse via SVD.
pub fn pseudoinverse<T: Scalar>(m: &ColumnMatrix<T>) -> ColumnMatrix<T> {
    let (d, n) = m.shape();
    let svd = Svd::new(m);
    let thr = rank_threshold(d, n, svd.sigma_max());
    // M⁺ = V Σ⁺ Uᵀ, which is n x d.
    let mut out = ColumnMatrix::zeros(n.max(1), d);
    if n == 0 {
        return out;
    }
    for (l, &s) in svd.sigma.iter().enumerate() {
        if s <= thr || s == T::zero() {
            continue;
        }
        let inv = T::one() / s;
        for j in 0..d {
            let coef = inv * svd.u[(j, l)];
            if coef == T::zero() {
                continue;
            }
            for (o, &vi) in out.col_mut(j).iter_mut().zip(svd.v.col(l)) {
                *o = *o + coef * vi;
            }
        }
    }
    out
}

/// Entrywise `||A_k - A||_p` for the Frobenius-optimal rank-`k` truncation.
pub fn svd_rank_k_error<T: Scalar>(a: &ColumnMatrix<T>, k: usize, p: PNorm) -> Result<T> {
    let (d, n) = a.shape();
    if k == 0 || k > d.min(n) {
        return Err(invalid(format!("k = {k} outside [1, {}]", d.min(n))));
    }
    let ak = Svd::new(a).reconstruct(k);
    entrywise_lp_norm(&ak.sub(a)?, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_cost_basic() {
        let u = ColumnMatrix::<f64>::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let a = ColumnMatrix::<f64>::from_rows(&[vec![1.0, 1.0], vec![0.0, 2.0]]).unwrap();
        let c = projection_cost_p2(&u, &a, PNorm::ONE).unwrap();
        assert!((c - 2.0).abs() < 1e-14);
        // containment
        assert!(projection_cost_p2(&a, &a, PNorm::ONE).unwrap() < 1e-14);
    }

    #[test]
    fn projection_cost_rank_deficient_u() {
        let u = ColumnMatrix::<f64>::from_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 0.0]]).unwrap();
        let a = ColumnMatrix::<f64>::from_rows(&[vec![3.0], vec![4.0]]).unwrap();
        let c = projection_cost_p2(&u, &a, PNorm::ONE).unwrap();
        assert!((c - 4.0).abs() < 1e-14);
        let z = ColumnMatrix::<f64>::zeros(2, 1);
        assert!((projection_cost_p2(&z, &a, PNorm::ONE).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn leverage_special_cases() {
        let q = ColumnMatrix::<f64>::from_rows(&[vec![0.6, -0.8], vec![0.8, 0.6]]).unwrap();
        for s in leverage_scores(&q) {
            assert!((s - 1.0).abs() < 1e-14);
        }
        let m = 5;
        let rep = ColumnMatrix::from_fn(m, 3, |_, j| (j + 1) as f64);
        for s in leverage_scores(&rep) {
            assert!((s - 1.0 / m as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn pseudoinverse_diagonal() {
        let eye = ColumnMatrix::<f64>::identity(3);
        assert!(pseudoinverse(&eye).sub(&eye).unwrap().max_abs() < 1e-14);
        let d = ColumnMatrix::<f64>::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let pd = pseudoinverse(&d);
        assert!((pd[(0, 0)] - 0.5).abs() < 1e-15);
        assert_eq!(pd[(1, 1)], 0.0);
        let z = ColumnMatrix::<f64>::zeros(2, 3);
        assert_eq!(pseudoinverse(&z).max_abs(), 0.0);
        assert_eq!(pseudoinverse(&z).shape(), (3, 2));
    }

    #[test]
    fn svd_error_vanishes_at_full_rank() {
        let a = ColumnMatrix::from_fn(4, 4, |i, j| ((i * 5 + j * 11) as f64).cos());
        assert!(svd_rank_k_error(&a, 4, PNorm::ONE).unwrap() < 1e-10);
        assert!(svd_rank_k_error(&a, 0, PNorm::ONE).is_err());
        assert!(svd_rank_k_error(&a, 5, PNorm::ONE).is_err());
    }
}
