//! `p`-stable and sparse sketching matrices.

mod pstable;
mod sparse;

use serde::{Deserialize, Serialize};

pub use pstable::{p_stable_from_uniforms, sample_p_stable, PStableSketch};
pub use sparse::SparseEmbedding;

use crate::error::{invalid, Result};
use crate::numerics::PNorm;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SketchKind {
    PStable,
    Sparse,
    Identity,
}

/// Everything needed to regenerate a sketch: `(kind, rows, cols, p, s, seed, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SketchDescriptor {
    pub kind: SketchKind,
    pub rows: usize,
    pub cols: usize,
    pub p: f64,
    pub sparsity: usize,
    pub seed: u64,
    pub scale: f64,
}

impl SketchDescriptor {
    /// Words needed to transmit the descriptor itself.
    pub const WORDS: usize = 7;

    pub fn regenerate_p_stable<T: Scalar>(&self) -> Result<PStableSketch<T>> {
        match self.kind {
            SketchKind::PStable => {
                PStableSketch::new(self.rows, self.cols, PNorm::new(self.p)?, self.seed, self.scale)
            }
            SketchKind::Identity => Ok(PStableSketch::identity(self.cols)),
            SketchKind::Sparse => Err(invalid("descriptor names a sparse embedding")),
        }
    }

    pub fn regenerate_sparse(&self) -> Result<SparseEmbedding> {
        match self.kind {
            SketchKind::Sparse => SparseEmbedding::new(self.rows, self.cols, self.sparsity, self.seed),
            _ => Err(invalid("descriptor does not name a sparse embedding")),
        }
    }
}

/// Experiment default: `⌈0.5 d⌉` sketch rows.
pub fn empirical_sketch_rows(d: usize) -> usize {
    d.div_ceil(2).max(1)
}

/// Library default: `k ⌈log₂(n d)⌉²` sketch rows.
pub fn theory_sketch_rows(k: usize, n: usize, d: usize) -> usize {
    let l = ((n.max(1) * d.max(1)) as f64).log2().ceil().max(1.0) as usize;
    k * l * l
}
