//! Seed derivation.
//!
//! Every randomized routine takes an explicit 64-bit seed and draws from a
//! ChaCha8 stream keyed by it. Child seeds for sub-tasks (one per batch,
//! merge, server, ...) are derived by hashing `(parent, label, index)`, so
//! the whole computation is fixed by one master seed regardless of the
//! order in which sub-tasks execute.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn label_hash(label: &str) -> u64 {
    // FNV-1a
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x1000_0000_01b3))
}

/// Child seed for the `index`-th task labelled `label` under `parent`.
pub fn derive_seed(parent: u64, label: &str, index: u64) -> u64 {
    splitmix64(splitmix64(parent ^ label_hash(label)).wrapping_add(splitmix64(index)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
