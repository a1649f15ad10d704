//! Column subset selection under entrywise `ℓp` norms, `1 ≤ p < 2`, in the
//! one-pass column-streaming and one-round distributed settings.
//!
//! Columns are sketched by a dense `p`-stable matrix, compressed into
//! Lewis-weight strong coresets under the `ℓ_{p,2}` norm, merged and reduced
//! along a binary tree (streaming) or gathered at a coordinator
//! (distributed), and finally handed to a bi-criteria or greedy `ℓ_{p,2}`
//! selection routine. The selected indices always refer to true columns of
//! the input.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

pub mod coreset;
pub mod css;
pub mod distributed;
mod error;
pub mod harness;
pub mod numerics;
pub mod rng;
mod scalar;
pub mod seeds;
pub mod sketch;
pub mod streaming;

pub use error::{CssError, Result};
pub use numerics::{ColumnMatrix, PNorm};
pub use scalar::Scalar;

pub type Matrix = ColumnMatrix<f64>;
pub type MatrixF32 = ColumnMatrix<f32>;
pub type Coreset = coreset::WeightedColumnSet<f64>;
pub type CoresetF32 = coreset::WeightedColumnSet<f32>;
pub type Selection = css::SelectionResult<f64>;
pub type SelectionF32 = css::SelectionResult<f32>;
pub type Sketch = sketch::PStableSketch<f64>;
pub type CoresetStack = streaming::LevelledCoresetStack<f64>;
pub type Streamer = streaming::StreamingSelector<f64>;
pub type Shard = distributed::ServerShard<f64>;
