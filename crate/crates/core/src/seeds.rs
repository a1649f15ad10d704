//! Seed layout shared by the streaming and distributed pipelines.
//!
//! Both pipelines derive their randomness from one master seed through the
//! same labels, which makes a single-batch stream and a single-server
//! protocol produce identical selections.

use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineSeeds {
    pub master: u64,
}

impl PipelineSeeds {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    /// Dense `p`-stable sketch.
    pub fn sketch(&self) -> u64 {
        derive_seed(self.master, "sketch", 0)
    }

    /// Coreset of the `i`-th leaf: a stream batch or a server shard.
    pub fn leaf(&self, i: u64) -> u64 {
        derive_seed(self.master, "leaf", i)
    }

    /// The `i`-th merge of the streaming tree.
    pub fn merge(&self, i: u64) -> u64 {
        derive_seed(self.master, "merge", i)
    }

    /// Final `ℓ_{p,2}` selection.
    pub fn select(&self) -> u64 {
        derive_seed(self.master, "select", 0)
    }
}
