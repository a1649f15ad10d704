//! One-pass column-update streaming selection.

mod selector;
mod stack;
mod uniform;

pub use selector::{SpaceReport, StreamOutput, StreamingConfig, StreamingSelector};
pub use stack::LevelledCoresetStack;
pub use uniform::{uniform_streaming_baseline, UniformStreamSampler};
