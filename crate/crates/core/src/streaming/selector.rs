use std::collections::BTreeMap;

use crate::coreset::{reduce, CoresetOptions, WeightedColumnSet};
use crate::css::{SelectionResult, Subroutine};
use crate::error::{invalid, mismatch, CssError, Result};
use crate::numerics::{ColumnMatrix, PNorm};
use crate::scalar::Scalar;
use crate::seeds::PipelineSeeds;
use crate::sketch::{empirical_sketch_rows, PStableSketch};
use crate::streaming::LevelledCoresetStack;

/// Streaming parameters. `None` fields take the experiment defaults:
/// `r = 5k`, `t_c = 2k`, `⌈0.5 d⌉` sketch rows.
#[derive(Debug, Clone, Copy)]
pub struct StreamingConfig {
    pub k: usize,
    pub p: PNorm,
    pub batch_size: Option<usize>,
    pub coreset_size: Option<usize>,
    pub sketch_rows: Option<usize>,
    /// Constant in front of the `1/t^{1/p}` entry scale.
    pub sketch_scale: f64,
    pub coreset: Option<CoresetOptions>,
    pub seed: u64,
}

impl StreamingConfig {
    pub fn new(k: usize, p: PNorm, seed: u64) -> Self {
        Self {
            k,
            p,
            batch_size: None,
            coreset_size: None,
            sketch_rows: None,
            sketch_scale: 1.0,
            coreset: None,
            seed,
        }
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size.unwrap_or(5 * self.k).max(1)
    }

    pub fn coreset_size(&self) -> usize {
        self.coreset_size.unwrap_or(2 * self.k).max(1)
    }

    pub fn sketch_rows(&self, d: usize) -> usize {
        self.sketch_rows.unwrap_or_else(|| empirical_sketch_rows(d))
    }

    pub fn coreset_options(&self) -> CoresetOptions {
        let mut o = self.coreset.unwrap_or_else(|| CoresetOptions::with_size(self.coreset_size()));
        o.size = self.coreset_size();
        o
    }
}

/// Space accounting. One word per stored real or index.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpaceReport {
    /// Peak number of stored columns: coreset columns plus the batch buffer.
    pub peak_columns: usize,
    /// Peak words: each coreset column costs `t + d + 2` words (sketched,
    /// original, index, weight) and each buffered column `t + d`.
    pub peak_words: usize,
    /// Words of the dense sketch held for the whole pass.
    pub sketch_words: usize,
    pub merge_count: usize,
    pub final_list_length: usize,
}

impl SpaceReport {
    /// `(⌈log₂(max(n/r, 1))⌉ + 1) t_c + r`.
    pub fn column_bound(n: usize, batch: usize, coreset: usize) -> usize {
        let ratio = (n as f64 / batch as f64).max(1.0);
        (ratio.log2().ceil() as usize + 1) * coreset + batch
    }
}

/// Output of a finished stream.
#[derive(Debug, Clone)]
pub struct StreamOutput<T> {
    pub selection: SelectionResult<T>,
    pub space: SpaceReport,
    /// The coreset the final selection ran on.
    pub final_coreset: WeightedColumnSet<T>,
}

/// One-pass column-update streaming selector built on merge-and-reduce.
///
/// Each incoming column is sketched by a dense `p`-stable matrix and
/// buffered alongside its original. A full batch of `r` columns becomes a
/// level-0 coreset of at most `t_c` columns, and equal-level coresets are
/// merged greedily, so at most one coreset per tree level is ever stored.
pub struct StreamingSelector<T> {
    config: StreamingConfig,
    seeds: PipelineSeeds,
    coreset: CoresetOptions,
    sketch: PStableSketch<T>,
    stack: LevelledCoresetStack<T>,
    buf_sketched: ColumnMatrix<T>,
    buf_original: ColumnMatrix<T>,
    buf_indices: Vec<usize>,
    dim: usize,
    seen: usize,
    leaves: u64,
    merges: u64,
    space: SpaceReport,
}

impl<T: Scalar> StreamingSelector<T> {
    pub fn new(dim: usize, config: StreamingConfig) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("columns must have at least one entry"));
        }
        if config.k == 0 {
            return Err(invalid("k must be positive"));
        }
        let seeds = PipelineSeeds::new(config.seed);
        let t = config.sketch_rows(dim);
        let sketch = PStableSketch::new(t, dim, config.p, seeds.sketch(), config.sketch_scale)?;
        Self::with_sketch(sketch, config)
    }

    /// Uses a caller-provided sketch, e.g. [`PStableSketch::identity`].
    pub fn with_sketch(sketch: PStableSketch<T>, config: StreamingConfig) -> Result<Self> {
        let dim = sketch.cols();
        let t = sketch.rows();
        Ok(Self {
            seeds: PipelineSeeds::new(config.seed),
            coreset: config.coreset_options(),
            space: SpaceReport {
                sketch_words: t * dim,
                ..SpaceReport::default()
            },
            sketch,
            stack: LevelledCoresetStack::new(),
            buf_sketched: ColumnMatrix::zeros(t, 0),
            buf_original: ColumnMatrix::zeros(dim, 0),
            buf_indices: Vec::new(),
            dim,
            seen: 0,
            leaves: 0,
            merges: 0,
            config,
        })
    }

    pub fn config(&self) -> &StreamingConfig {
        &self.config
    }

    pub fn sketch(&self) -> &PStableSketch<T> {
        &self.sketch
    }

    pub fn seen(&self) -> usize {
        self.seen
    }

    pub fn buffered(&self) -> usize {
        self.buf_indices.len()
    }

    pub fn levels(&self) -> Vec<usize> {
        self.stack.levels()
    }

    pub fn stored_coresets(&self) -> usize {
        self.stack.len()
    }

    pub fn stack(&self) -> &LevelledCoresetStack<T> {
        &self.stack
    }

    pub fn space(&self) -> SpaceReport {
        SpaceReport {
            final_list_length: self.stack.len(),
            merge_count: self.merges as usize,
            ..self.space
        }
    }

    fn record_space(&mut self) {
        let t = self.sketch.rows();
        let cols = self.stack.stored_columns() + self.buf_indices.len();
        let words = self.stack.stored_words() + self.buf_indices.len() * (t + self.dim);
        self.space.peak_columns = self.space.peak_columns.max(cols);
        self.space.peak_words = self.space.peak_words.max(words);
    }

    /// Consumes one column of the stream. Its global index is its arrival
    /// position.
    pub fn ingest(&mut self, column: &[T]) -> Result<()> {
        if column.len() != self.dim {
            return Err(mismatch(format!(
                "stream column of length {}, expected {}",
                column.len(),
                self.dim
            )));
        }
        if let Some(pos) = column.iter().position(|x| !x.is_finite()) {
            return Err(CssError::NonFinite {
                row: pos,
                col: self.seen,
            });
        }
        let sketched = self.sketch.apply_column(column)?;
        self.buf_sketched.push_column(&sketched)?;
        self.buf_original.push_column(column)?;
        self.buf_indices.push(self.seen);
        self.seen += 1;
        self.record_space();
        if self.buf_indices.len() == self.config.batch_size() {
            self.flush_batch()?;
        }
        Ok(())
    }

    /// Feeds every column of an iterator; the iterator is consumed once.
    pub fn ingest_all<I, C>(&mut self, columns: I) -> Result<()>
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[T]>,
    {
        for c in columns {
            self.ingest(c.as_ref())?;
        }
        Ok(())
    }

    fn flush_batch(&mut self) -> Result<()> {
        let t = self.sketch.rows();
        let sketched = std::mem::replace(&mut self.buf_sketched, ColumnMatrix::zeros(t, 0));
        let original = std::mem::replace(&mut self.buf_original, ColumnMatrix::zeros(self.dim, 0));
        let indices = std::mem::take(&mut self.buf_indices);
        let set = WeightedColumnSet::from_columns(sketched, original, indices, self.config.p)?;
        let leaf = reduce(set, &self.coreset, self.seeds.leaf(self.leaves))?;
        self.leaves += 1;
        self.stack.push(leaf, 0);
        self.record_space();
        self.recursive_merge()
    }

    /// Merges equal-level coresets at the back of the list.
    pub fn recursive_merge(&mut self) -> Result<()> {
        let seeds = self.seeds;
        let merges = &mut self.merges;
        self.stack.recursive_merge(&self.coreset, || {
            let s = seeds.merge(*merges);
            *merges += 1;
            s
        })?;
        Ok(())
    }

    /// Ends the stream: flushes the partial batch, merges, and runs the
    /// `ℓ_{p,2}` subroutine on the concatenation of the remaining coresets.
    /// Selected indices are mapped back to stream positions and the left
    /// factor holds the original columns.
    pub fn finalize(mut self, subroutine: &Subroutine) -> Result<StreamOutput<T>> {
        if self.seen == 0 {
            return Err(CssError::Empty("stream ended without columns".into()));
        }
        if !self.buf_indices.is_empty() {
            self.flush_batch()?;
        }
        let space = self.space();
        let coreset = self.stack.concatenated()?;
        let inner = subroutine.run(&coreset.sketched, self.config.k, self.config.p, self.seeds.select())?;
        let indices: Vec<usize> = inner.indices.iter().map(|&i| coreset.global_indices[i]).collect();
        let left_factor = coreset.originals.select_columns(&inner.indices);

        let mut meta = inner.meta.clone();
        meta.seed = self.config.seed;
        let extra: BTreeMap<String, String> = [
            ("mode", "streaming".to_string()),
            ("batch_size", self.config.batch_size().to_string()),
            ("coreset_size", self.coreset.size.to_string()),
            ("sketch_rows", self.sketch.rows().to_string()),
            ("n", self.seen.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        meta.params.extend(extra);

        Ok(StreamOutput {
            selection: SelectionResult {
                indices,
                left_factor,
                right_factor: None,
                err_p2: inner.err_p2,
                err_p: None,
                err_history: inner.err_history,
                utility_history: inner.utility_history,
                meta,
            },
            space,
            final_coreset: coreset,
        })
    }
}
