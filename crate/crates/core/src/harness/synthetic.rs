use crate::error::{invalid, Result};
use crate::numerics::ColumnMatrix;
use crate::scalar::Scalar;

/// The `(k+n)×(k+n)` adversarial matrix: `n^{3/2} I_k` in the top-left
/// block, an all-ones `n×n` block in the bottom-right, zeros elsewhere.
///
/// Rank-`k` SVD keeps the scaled identity and pays `n²` in `ℓ1`, while `k−1`
/// identity columns plus any ones column pay only `n^{3/2}`.
pub fn gen_synthetic<T: Scalar>(n: usize, k: usize) -> Result<ColumnMatrix<T>> {
    if n == 0 || k == 0 {
        return Err(invalid("synthetic matrix needs n, k >= 1"));
    }
    let big = T::of((n as f64).powf(1.5));
    let size = k + n;
    Ok(ColumnMatrix::from_fn(size, size, |i, j| {
        if i < k && j < k {
            if i == j {
                big
            } else {
                T::zero()
            }
        } else if i >= k && j >= k {
            T::one()
        } else {
            T::zero()
        }
    }))
}

/// Index set `{0, …, k−2} ∪ {k}` whose `ℓ1` fit error is `n^{3/2}`.
pub fn synthetic_certificate(k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..k.saturating_sub(1)).collect();
    idx.push(k);
    idx
}
