use std::collections::BTreeMap;

use rand::Rng as _;

use crate::css::{Algorithm, SelectionMeta, SelectionResult};
use crate::error::{invalid, CssError, Result};
use crate::numerics::ColumnMatrix;
use crate::rng::{rng_from_seed, Rng};
use crate::scalar::Scalar;

/// Uniform streaming baseline: keeps the first `k` columns, then admits each
/// later column with probability 1/2, evicting a uniformly chosen kept one.
pub struct UniformStreamSampler<T> {
    k: usize,
    kept: Vec<(usize, Vec<T>)>,
    seen: usize,
    seed: u64,
    rng: Rng,
}

impl<T: Scalar> UniformStreamSampler<T> {
    pub fn new(k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be positive"));
        }
        Ok(Self {
            k,
            kept: Vec::with_capacity(k),
            seen: 0,
            seed,
            rng: rng_from_seed(seed),
        })
    }

    /// Returns whether the column was kept.
    pub fn ingest(&mut self, column: &[T]) -> bool {
        let idx = self.seen;
        self.seen += 1;
        if self.kept.len() < self.k {
            self.kept.push((idx, column.to_vec()));
            return true;
        }
        if self.rng.gen::<bool>() {
            let slot = self.rng.gen_range(0..self.k);
            self.kept[slot] = (idx, column.to_vec());
            true
        } else {
            false
        }
    }

    pub fn kept_indices(&self) -> Vec<usize> {
        self.kept.iter().map(|(i, _)| *i).collect()
    }

    /// Selection in kept-slot order. `err_p2` is NaN: the sampler never sees
    /// a matrix to evaluate against.
    pub fn finish(self) -> Result<SelectionResult<T>> {
        let Some(d) = self.kept.first().map(|(_, c)| c.len()) else {
            return Err(CssError::Empty("stream ended without columns".into()));
        };
        let cols: Vec<&[T]> = self.kept.iter().map(|(_, c)| c.as_slice()).collect();
        let left_factor = ColumnMatrix::from_columns(d, &cols)?;
        let mut params = BTreeMap::new();
        params.insert("k".into(), self.k.to_string());
        params.insert("mode".into(), "streaming".into());
        Ok(SelectionResult {
            indices: self.kept.iter().map(|(i, _)| *i).collect(),
            left_factor,
            right_factor: None,
            err_p2: T::nan(),
            err_p: None,
            err_history: Vec::new(),
            utility_history: Vec::new(),
            meta: SelectionMeta {
                algorithm: Algorithm::Uniform,
                seed: self.seed,
                params,
                truncated: false,
            },
        })
    }
}

/// Runs the uniform baseline over a whole stream.
pub fn uniform_streaming_baseline<T, I, C>(stream: I, k: usize, seed: u64) -> Result<SelectionResult<T>>
where
    T: Scalar,
    I: IntoIterator<Item = C>,
    C: AsRef<[T]>,
{
    let mut s = UniformStreamSampler::new(k, seed)?;
    for c in stream {
        s.ingest(c.as_ref());
    }
    s.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_stream_keeps_everything() {
        let cols: Vec<Vec<f64>> = (0..3).map(|i| vec![i as f64, 1.0]).collect();
        let r = uniform_streaming_baseline(&cols, 5, 1).unwrap();
        assert_eq!(r.indices, vec![0, 1, 2]);
    }

    #[test]
    fn deterministic_under_seed() {
        let cols: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64]).collect();
        let a = uniform_streaming_baseline(&cols, 4, 9).unwrap();
        let b = uniform_streaming_baseline(&cols, 4, 9).unwrap();
        assert_eq!(a.indices, b.indices);
        assert_eq!(a.indices.len(), 4);
    }
}
