//! `ℓp` regression by iteratively reweighted least squares.

use crate::error::{mismatch, Result};
use crate::numerics::qr::PivotedQr;
use crate::numerics::{ColumnMatrix, PNorm};
use crate::scalar::Scalar;

/// IRLS stopping rule.
#[derive(Debug, Clone, Copy)]
pub struct IrlsOptions {
    /// Relative objective change below which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Residual magnitudes are clamped below by this value when forming weights.
    pub weight_floor: f64,
    /// New weights are blended as `damping * old + (1 - damping) * new`.
    pub damping: f64,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            weight_floor: 1e-10,
            damping: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpFit<T> {
    pub coefficients: Vec<T>,
    /// `||B v - y||_p` at the returned coefficients.
    pub objective: T,
    pub iterations: usize,
    pub converged: bool,
}

fn objective<T: Scalar>(b: &ColumnMatrix<T>, v: &[T], y: &[T], p: T) -> T {
    let fit = b.mul_vec(v);
    let s: T = fit.iter().zip(y).map(|(&f, &t)| (f - t).abs().powf(p)).sum();
    s.powf(T::one() / p)
}

fn weighted_solve<T: Scalar>(b: &ColumnMatrix<T>, y: &[T], weights: &[T]) -> Vec<T> {
    let mut bw = b.clone();
    let sw: Vec<T> = weights.iter().map(|w| w.sqrt()).collect();
    for j in 0..bw.cols() {
        for (x, &s) in bw.col_mut(j).iter_mut().zip(&sw) {
            *x = *x * s;
        }
    }
    let yw: Vec<T> = y.iter().zip(&sw).map(|(&a, &s)| a * s).collect();
    PivotedQr::new(&bw).solve_least_squares(&yw)
}

/// Approximately minimizes `||B v - y||_p`.
///
/// The plain least-squares solution seeds the iteration and stays the
/// fallback, so the returned objective never exceeds its `ℓp` objective.
/// The best iterate seen is returned; `converged == false` flags hitting
/// `max_iter`.
pub fn lp_regression<T: Scalar>(
    b: &ColumnMatrix<T>,
    y: &[T],
    p: PNorm,
    opts: &IrlsOptions,
) -> Result<LpFit<T>> {
    if b.rows() != y.len() {
        return Err(mismatch(format!(
            "B has {} rows but y has length {}",
            b.rows(),
            y.len()
        )));
    }
    let pp: T = p.get();
    let mut v = PivotedQr::new(b).solve_least_squares(y);
    let mut obj = objective(b, &v, y, pp);
    let mut best = (v.clone(), obj);
    if b.cols() == 0 || obj == T::zero() {
        return Ok(LpFit {
            coefficients: v,
            objective: obj,
            iterations: 0,
            converged: true,
        });
    }

    let floor = T::of(opts.weight_floor);
    let damp = T::of(opts.damping);
    let exponent = pp - T::of(2.0);
    let mut weights: Option<Vec<T>> = None;
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..opts.max_iter {
        iterations = it + 1;
        let fit = b.mul_vec(&v);
        let fresh: Vec<T> = fit
            .iter()
            .zip(y)
            .map(|(&f, &t)| (f - t).abs().max(floor).powf(exponent))
            .collect();
        let w = match weights {
            None => fresh,
            Some(old) => old
                .iter()
                .zip(&fresh)
                .map(|(&o, &n)| damp * o + (T::one() - damp) * n)
                .collect(),
        };
        // Normalize so the largest weight is one; keeps the QR well scaled.
        let wmax = w.iter().fold(T::zero(), |m, &x| m.max(x));
        let w: Vec<T> = w.iter().map(|&x| x / wmax).collect();
        v = weighted_solve(b, y, &w);
        weights = Some(w);

        let next = objective(b, &v, y, pp);
        if next < best.1 {
            best = (v.clone(), next);
        }
        let change = (obj - next).abs() / obj.max(T::min_positive_value());
        obj = next;
        if change < T::of(opts.tol) || next == T::zero() {
            converged = true;
            break;
        }
    }

    Ok(LpFit {
        coefficients: best.0,
        objective: best.1,
        iterations,
        converged,
    })
}

/// `min_V ||B V - A||_p` solved column by column; returns the aggregate
/// entrywise error.
pub fn lp_fit_error<T: Scalar>(
    b: &ColumnMatrix<T>,
    a: &ColumnMatrix<T>,
    p: PNorm,
    opts: &IrlsOptions,
) -> Result<T> {
    let pp: T = p.get();
    let mut total = T::zero();
    for c in a.columns() {
        let fit = lp_regression(b, c, p, opts)?;
        total = total + fit.objective.powf(pp);
    }
    Ok(total.powf(T::one() / pp))
}
