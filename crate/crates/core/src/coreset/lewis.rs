//! `ℓp` Lewis weights by fixed-point iteration.

use crate::error::{invalid, CssError, Result};
use crate::numerics::{leverage_scores, ColumnMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct LewisOptions {
    /// Stop when the largest relative change of a weight drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LewisOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100,
        }
    }
}

/// Lewis weights of the rows of a matrix.
#[derive(Debug, Clone)]
pub struct LewisWeights<T> {
    pub weights: Vec<T>,
    pub p: f64,
    /// `max_i |w_i - ℓ_i(diag(w)^{1/2-1/p} M)|` at the returned weights.
    pub residual: T,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Scalar> LewisWeights<T> {
    pub fn total(&self) -> T {
        self.weights.iter().copied().sum()
    }
}

fn reweighted_leverage<T: Scalar>(rows: &ColumnMatrix<T>, w: &[T], p: f64) -> Vec<T> {
    let exponent = T::of(0.5 - 1.0 / p);
    let mut scaled = rows.clone();
    let factors: Vec<T> = w
        .iter()
        .map(|&wi| if wi > T::zero() { wi.powf(exponent) } else { T::zero() })
        .collect();
    for j in 0..scaled.cols() {
        for (x, &f) in scaled.col_mut(j).iter_mut().zip(&factors) {
            *x = *x * f;
        }
    }
    leverage_scores(&scaled)
}

/// Lewis weights `w_i = ℓ_i(diag(w)^{1/2 - 1/p} M)` of the rows of `rows`.
///
/// Iterates `w_i ← (a_iᵀ (Mᵀ W^{1-2/p} M)⁻¹ a_i)^{p/2}` from `w = 1`. The
/// quadratic form is read off as `τ_i w_i^{2/p-1}`, where `τ` are the
/// leverage scores of the reweighted rows computed from an orthonormal
/// basis, so rank-deficient inputs need no explicit Gram inverse. The map is
/// a contraction for `p < 4`; `p = 2` reduces to plain leverage scores.
pub fn lewis_weights<T: Scalar>(
    rows: &ColumnMatrix<T>,
    p: f64,
    opts: &LewisOptions,
) -> Result<LewisWeights<T>> {
    if rows.is_empty() {
        return Err(CssError::Empty("Lewis weights of a matrix without columns".into()));
    }
    if !(1.0..4.0).contains(&p) {
        return Err(invalid(format!("Lewis weight exponent {p} outside [1, 4)")));
    }
    let n = rows.rows();
    let half_p = T::of(p / 2.0);
    let back = T::of(2.0 / p - 1.0);
    let tol = T::of(opts.tol).max(T::epsilon() * T::of(16.0));

    let mut w = vec![T::one(); n];
    let mut iterations = 0;
    let mut converged = false;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        let tau = reweighted_leverage(rows, &w, p);
        let mut change = T::zero();
        for (wi, &ti) in w.iter_mut().zip(&tau) {
            let next = if ti > T::zero() && *wi > T::zero() {
                (ti * wi.powf(back)).powf(half_p)
            } else {
                T::zero()
            };
            let rel = (next - *wi).abs() / wi.max(T::min_positive_value());
            change = change.max(rel);
            *wi = next;
        }
        if change < tol {
            converged = true;
            break;
        }
    }

    let tau = reweighted_leverage(rows, &w, p);
    let residual = w
        .iter()
        .zip(&tau)
        .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
    if !converged {
        log::warn!("Lewis weights stopped after {iterations} iterations, residual {residual}");
    }
    Ok(LewisWeights {
        weights: w,
        p,
        residual,
        iterations,
        converged,
    })
}
