//! Lewis-weight sampling and `ℓ_{p,2}` strong coresets.

mod lewis;
mod weighted;

use rand::distributions::{Distribution, WeightedIndex};

pub use lewis::{lewis_weights, LewisOptions, LewisWeights};
pub use weighted::WeightedColumnSet;

use crate::error::{invalid, mismatch, Result};
use crate::numerics::{ColumnMatrix, PNorm};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// Strong coreset construction parameters.
#[derive(Debug, Clone, Copy)]
pub struct CoresetOptions {
    /// Target number of sampled columns `t_c`.
    pub size: usize,
    /// When set, the sample count is multiplied by `⌈log₂(1/δ)⌉`.
    pub failure_probability: Option<f64>,
    pub lewis: LewisOptions,
}

impl CoresetOptions {
    pub fn with_size(size: usize) -> Self {
        Self {
            size,
            failure_probability: None,
            lewis: LewisOptions::default(),
        }
    }

    /// Number of draws after high-probability boosting.
    pub fn sample_count(&self) -> usize {
        match self.failure_probability {
            Some(delta) if delta > 0.0 && delta < 0.5 => {
                self.size * (1.0 / delta).log2().ceil() as usize
            }
            _ => self.size,
        }
    }
}

/// Draws `count` i.i.d. indices with probability `λ_i = w_i / Σ w` and
/// returns each draw's rescale factor `1 / (count λ_i)^{1/p}`.
pub fn lewis_sample<T: Scalar>(
    weights: &[T],
    count: usize,
    p: PNorm,
    seed: u64,
) -> Result<(Vec<usize>, Vec<T>)> {
    if count == 0 {
        return Err(invalid("sample count must be at least one"));
    }
    let w: Vec<f64> = weights.iter().map(|x| x.f64().max(0.0)).collect();
    let total: f64 = w.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(invalid("all sampling weights are zero"));
    }
    let dist = WeightedIndex::new(&w).map_err(|e| invalid(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let inv_p = 1.0 / p.value();
    let mut picks = Vec::with_capacity(count);
    let mut factors = Vec::with_capacity(count);
    for _ in 0..count {
        let i = dist.sample(&mut rng);
        let lambda = w[i] / total;
        picks.push(i);
        factors.push(T::of((1.0 / (count as f64 * lambda)).powf(inv_p)));
    }
    Ok((picks, factors))
}

/// Samples a strong coreset from an already weighted set by the Lewis
/// weights of its sketched columns, always drawing `opts.sample_count()`.
pub fn sample_coreset<T: Scalar>(
    set: &WeightedColumnSet<T>,
    opts: &CoresetOptions,
    seed: u64,
) -> Result<WeightedColumnSet<T>> {
    set.validate()?;
    if set.is_empty() {
        return Ok(set.clone());
    }
    let lw = lewis_weights(&set.sketched.transpose(), set.p.value(), &opts.lewis)?;
    let (picks, factors) = lewis_sample(&lw.weights, opts.sample_count(), set.p, seed)?;
    Ok(set.resample(&picks, &factors, seed))
}

/// Strong coreset of the columns of `sketched`, carrying `originals` and
/// `global_indices` along.
pub fn build_strong_coreset<T: Scalar>(
    sketched: &ColumnMatrix<T>,
    originals: &ColumnMatrix<T>,
    global_indices: &[usize],
    p: PNorm,
    opts: &CoresetOptions,
    seed: u64,
) -> Result<WeightedColumnSet<T>> {
    if sketched.cols() != originals.cols() {
        return Err(mismatch("sketched and original column counts differ"));
    }
    let set = WeightedColumnSet::from_columns(
        sketched.clone(),
        originals.clone(),
        global_indices.to_vec(),
        p,
    )?;
    sample_coreset(&set, opts, seed)
}

/// A set no larger than the target is its own coreset; anything larger is
/// sampled down.
pub fn reduce<T: Scalar>(
    set: WeightedColumnSet<T>,
    opts: &CoresetOptions,
    seed: u64,
) -> Result<WeightedColumnSet<T>> {
    if set.len() <= opts.sample_count() {
        Ok(set)
    } else {
        sample_coreset(&set, opts, seed)
    }
}

/// Coreset of the concatenation of two coresets. Weights compose
/// multiplicatively and provenance follows the sampled columns.
pub fn merge_coresets<T: Scalar>(
    a: &WeightedColumnSet<T>,
    b: &WeightedColumnSet<T>,
    opts: &CoresetOptions,
    seed: u64,
) -> Result<WeightedColumnSet<T>> {
    if a.sketched_rows() != b.sketched_rows() || a.original_rows() != b.original_rows() {
        return Err(mismatch("merging coresets of different row dimensions"));
    }
    reduce(a.concat(b)?, opts, seed)
}
