//! Thin SVD by one-sided Jacobi rotations.

use crate::numerics::ColumnMatrix;
use crate::scalar::Scalar;

/// `A = U diag(sigma) Vᵀ` with singular values sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: ColumnMatrix<T>,
    pub sigma: Vec<T>,
    pub v: ColumnMatrix<T>,
}

const MAX_SWEEPS: usize = 80;

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn rotate<T: Scalar>(m: &mut ColumnMatrix<T>, i: usize, j: usize, c: T, s: T) {
    for r in 0..m.rows() {
        let a = m[(r, i)];
        let b = m[(r, j)];
        m[(r, i)] = c * a - s * b;
        m[(r, j)] = s * a + c * b;
    }
}

/// Jacobi on a tall (`rows >= cols`) matrix.
fn jacobi_tall<T: Scalar>(a: &ColumnMatrix<T>) -> Svd<T> {
    let n = a.cols();
    let mut w = a.clone();
    let mut v = ColumnMatrix::identity(n.max(1));
    if n == 0 {
        return Svd {
            u: ColumnMatrix::zeros(a.rows(), 0),
            sigma: vec![],
            v: ColumnMatrix::zeros(1, 0),
        };
    }
    let tol = T::epsilon() * T::of(a.rows() as f64).sqrt();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = dot(w.col(i), w.col(i));
                let beta = dot(w.col(j), w.col(j));
                let gamma = dot(w.col(i), w.col(j));
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::of(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, T)> = (0..n).map(|j| (j, dot(w.col(j), w.col(j)).sqrt())).collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

    let mut u = ColumnMatrix::zeros(a.rows(), n);
    let mut vs = ColumnMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (dst, &(src, s)) in order.iter().enumerate() {
        sigma.push(s);
        if s > T::zero() {
            for (o, &x) in u.col_mut(dst).iter_mut().zip(w.col(src)) {
                *o = x / s;
            }
        }
        vs.col_mut(dst).copy_from_slice(v.col(src));
    }
    Svd { u, sigma, v: vs }
}

impl<T: Scalar> Svd<T> {
    pub fn new(a: &ColumnMatrix<T>) -> Self {
        if a.rows() >= a.cols() {
            jacobi_tall(a)
        } else {
            let t = jacobi_tall(&a.transpose());
            Svd {
                u: t.v,
                sigma: t.sigma,
                v: t.u,
            }
        }
    }

    pub fn sigma_max(&self) -> T {
        self.sigma.first().copied().unwrap_or_else(T::zero)
    }

    /// Number of singular values above `max(d, n) * eps * sigma_max`.
    pub fn rank(&self) -> usize {
        let (d, n) = (self.u.rows(), self.v.rows());
        let thr = crate::numerics::qr::rank_threshold(d, n, self.sigma_max());
        self.sigma.iter().filter(|&&s| s > thr).count()
    }

    /// `U_k diag(sigma_k) V_kᵀ`.
    pub fn reconstruct(&self, k: usize) -> ColumnMatrix<T> {
        let d = self.u.rows();
        let n = self.v.rows();
        let k = k.min(self.sigma.len());
        let mut out = ColumnMatrix::zeros(d, n);
        for l in 0..k {
            let s = self.sigma[l];
            for j in 0..n {
                let coef = s * self.v[(j, l)];
                if coef == T::zero() {
                    continue;
                }
                for (o, &ui) in out.col_mut(j).iter_mut().zip(self.u.col(l)) {
                    *o = *o + coef * ui;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_wide_and_tall() {
        for &(d, n) in &[(6usize, 4usize), (3, 7), (5, 5)] {
            let a = ColumnMatrix::from_fn(d, n, |i, j| ((i * 7 + j * 3) as f64).sin());
            let svd = Svd::new(&a);
            let back = svd.reconstruct(svd.sigma.len());
            assert!(back.sub(&a).unwrap().max_abs() < 1e-12, "{d}x{n}");
            for w in svd.sigma.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn rank_one_detected() {
        let a = ColumnMatrix::from_fn(5, 4, |i, j| (i as f64 + 1.0) * (j as f64 - 1.5));
        assert_eq!(Svd::new(&a).rank(), 1);
    }
}
