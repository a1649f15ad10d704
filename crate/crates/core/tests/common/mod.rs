#![allow(dead_code)]

use lpcss::rng::{rng_from_seed, Rng};
use lpcss::Matrix;
use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> Rng {
    rng_from_seed(seed ^ 0x7e57_5eed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_vec(n: usize, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn to_na(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(a.rows(), a.cols(), a.as_slice())
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix {
    Matrix::from_col_major(m.nrows(), m.ncols(), m.as_slice().to_vec()).unwrap()
}

/// Euclidean distance of `y` to the span of `u`'s columns, via the normal
/// equations solved by nalgebra.
pub fn residual_normal_equations(u: &Matrix, y: &[f64]) -> f64 {
    let un = to_na(u);
    let yn = nalgebra::DVector::from_column_slice(y);
    let g = un.transpose() * &un;
    let rhs = un.transpose() * &yn;
    let x = g.lu().solve(&rhs).expect("full column rank");
    (un * x - yn).norm()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// All `r`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_distance(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}
