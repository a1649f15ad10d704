use std::collections::BTreeMap;

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::css::{Algorithm, SelectionMeta, SelectionResult};
use crate::error::{invalid, Result};
use crate::numerics::norms::l2;
use crate::numerics::ops::remove_projection;
use crate::numerics::{projection_cost_p2, pseudoinverse, ColumnMatrix, PNorm};
use crate::rng::{derive_seed, rng_from_seed};
use crate::scalar::Scalar;

/// Relative residual norm under which a candidate counts as already spanned.
pub const IN_SPAN_TOLERANCE: f64 = 1e-10;

/// Incrementally maintained projection state for greedy selection.
///
/// Holds an orthonormal basis `Q` of the selected columns and the residual
/// `A - Q Qᵀ A` column by column, so that the utility
/// `Φ(T) = ||A||_{p,2}^p - ||A - π_T A||_{p,2}^p` and the gain of every
/// candidate are available without refactoring.
#[derive(Debug, Clone)]
pub struct GreedyUtilityState<T> {
    p: PNorm,
    selected: Vec<usize>,
    basis: ColumnMatrix<T>,
    residuals: ColumnMatrix<T>,
    residual_norms: Vec<T>,
    column_norms: Vec<T>,
    total: T,
}

impl<T: Scalar> GreedyUtilityState<T> {
    pub fn new(a: &ColumnMatrix<T>, p: PNorm) -> Self {
        let pp: T = p.get();
        let column_norms: Vec<T> = a.columns().map(l2).collect();
        let total = column_norms.iter().map(|v| v.powf(pp)).sum();
        Self {
            p,
            selected: Vec::new(),
            basis: ColumnMatrix::zeros(a.rows(), 0),
            residuals: a.clone(),
            residual_norms: column_norms.clone(),
            column_norms,
            total,
        }
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn basis(&self) -> &ColumnMatrix<T> {
        &self.basis
    }

    pub fn residual_norms(&self) -> &[T] {
        &self.residual_norms
    }

    /// `||A - π_T A||_{p,2}^p`.
    pub fn residual_cost(&self) -> T {
        let pp: T = self.p.get();
        self.residual_norms.iter().map(|v| v.powf(pp)).sum()
    }

    pub fn err_p2(&self) -> T {
        self.residual_cost().powf(T::one() / self.p.get())
    }

    pub fn phi(&self) -> T {
        self.total - self.residual_cost()
    }

    /// Unit direction column `j` would add to the basis, if any.
    fn new_direction(&self, j: usize) -> Option<Vec<T>> {
        let norm = self.residual_norms[j];
        let orig = self.column_norms[j];
        if orig == T::zero() || norm <= T::of(IN_SPAN_TOLERANCE) * orig {
            return None;
        }
        let mut q: Vec<T> = self.residuals.col(j).to_vec();
        remove_projection(&self.basis, &mut q);
        let nq = l2(&q);
        if nq <= T::of(IN_SPAN_TOLERANCE) * orig {
            return None;
        }
        for x in &mut q {
            *x = *x / nq;
        }
        Some(q)
    }

    /// `||A - π_{T ∪ {j}} A||_{p,2}^p` without committing `j`.
    pub fn candidate_cost(&self, j: usize) -> T {
        let Some(q) = self.new_direction(j) else {
            return self.residual_cost();
        };
        let half_p = self.p.get::<T>() / T::of(2.0);
        self.residuals
            .columns()
            .zip(&self.residual_norms)
            .map(|(r, &nr)| {
                let c: T = r.iter().zip(&q).map(|(&a, &b)| a * b).sum();
                (nr * nr - c * c).max(T::zero()).powf(half_p)
            })
            .sum()
    }

    pub fn commit(&mut self, j: usize) {
        if let Some(q) = self.new_direction(j) {
            for i in 0..self.residuals.cols() {
                let r = self.residuals.col_mut(i);
                let c: T = r.iter().zip(&q).map(|(&a, &b)| a * b).sum();
                for (x, &qi) in r.iter_mut().zip(&q) {
                    *x = *x - c * qi;
                }
                self.residual_norms[i] = l2(r);
            }
            self.basis.push_column(&q).expect("basis rows match");
        }
        self.selected.push(j);
    }
}

/// Greedy parameters.
#[derive(Debug, Clone, Copy)]
pub struct GreedyConfig {
    /// Number of columns `r` to select.
    pub output: usize,
    /// Failure probability `δ` sizing the candidate pool.
    pub delta: f64,
    /// When set, overrides the `⌈(n/k) ln(1/δ)⌉` pool size.
    pub pool_size: Option<usize>,
    pub parallel: bool,
    pub compute_right_factor: bool,
}

impl GreedyConfig {
    pub fn new(output: usize) -> Self {
        Self {
            output,
            delta: 0.1,
            pool_size: None,
            parallel: true,
            compute_right_factor: true,
        }
    }

    pub fn pool(&self, n: usize, k: usize) -> usize {
        self.pool_size.unwrap_or_else(|| {
            ((n as f64 / k as f64) * (1.0 / self.delta).ln()).ceil().max(1.0) as usize
        })
    }
}

/// Lazier-than-lazy greedy selection under `ℓ_{p,2}`: each round draws a
/// candidate pool uniformly from the unselected columns and commits the
/// candidate whose addition leaves the smallest projection cost. Ties go to
/// the smallest column index.
pub fn greedy_css_p2<T: Scalar>(
    a: &ColumnMatrix<T>,
    k: usize,
    p: PNorm,
    cfg: &GreedyConfig,
    seed: u64,
) -> Result<SelectionResult<T>> {
    let n = a.cols();
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(invalid(format!("delta = {} outside (0, 1)", cfg.delta)));
    }
    let mut state = GreedyUtilityState::new(a, p);
    let mut unselected: Vec<usize> = (0..n).collect();
    let mut err_history = Vec::with_capacity(cfg.output);
    let mut utility_history = Vec::with_capacity(cfg.output);
    let pool = cfg.pool(n, k);
    let mut truncated = false;

    for round in 0..cfg.output {
        if unselected.is_empty() {
            truncated = true;
            break;
        }
        let size = pool.min(unselected.len());
        let mut rng = rng_from_seed(derive_seed(seed, "greedy-pool", round as u64));
        let mut candidates: Vec<usize> = sample(&mut rng, unselected.len(), size)
            .into_iter()
            .map(|pos| unselected[pos])
            .collect();
        candidates.sort_unstable();

        let costs: Vec<T> = if cfg.parallel && candidates.len() > 8 {
            candidates.par_iter().map(|&j| state.candidate_cost(j)).collect()
        } else {
            candidates.iter().map(|&j| state.candidate_cost(j)).collect()
        };
        let mut best = 0;
        for (idx, c) in costs.iter().enumerate().skip(1) {
            if *c < costs[best] {
                best = idx;
            }
        }
        let chosen = candidates[best];
        state.commit(chosen);
        unselected.retain(|&j| j != chosen);
        err_history.push(state.err_p2());
        utility_history.push(state.phi());
    }

    let indices = state.selected().to_vec();
    let u = a.select_columns(&indices);
    let right_factor = if cfg.compute_right_factor && !indices.is_empty() {
        Some(pseudoinverse(&u).matmul(a)?)
    } else {
        None
    };
    let mut params = BTreeMap::new();
    params.insert("k".into(), k.to_string());
    params.insert("p".into(), p.to_string());
    params.insert("output".into(), cfg.output.to_string());
    params.insert("delta".into(), cfg.delta.to_string());
    params.insert("pool".into(), pool.to_string());

    Ok(SelectionResult {
        indices,
        left_factor: u,
        right_factor,
        err_p2: state.err_p2(),
        err_p: None,
        err_history,
        utility_history,
        meta: SelectionMeta {
            algorithm: Algorithm::Greedy,
            seed,
            params,
            truncated,
        },
    })
}

/// `Φ_A(T) = ||A||_{p,2}^p - min_V ||A_T V - A||_{p,2}^p`.
pub fn phi_utility<T: Scalar>(a: &ColumnMatrix<T>, subset: &[usize], p: PNorm) -> Result<T> {
    if let Some(&bad) = subset.iter().find(|&&j| j >= a.cols()) {
        return Err(invalid(format!("column {bad} out of range")));
    }
    let pp: T = p.get();
    let total: T = a.columns().map(|c| l2(c).powf(pp)).sum();
    if subset.is_empty() {
        return Ok(T::zero());
    }
    let cost = projection_cost_p2(&a.select_columns(subset), a, p)?;
    Ok(total - cost.powf(pp))
}
