//! Column subset selection under the `ℓ_{p,2}` norm.

mod greedy;
mod regular;
mod result;

pub use greedy::{greedy_css_p2, phi_utility, GreedyConfig, GreedyUtilityState, IN_SPAN_TOLERANCE};
pub use regular::{regular_css_p2, RegularConfig};
pub use result::{Algorithm, SelectionMeta, SelectionReport, SelectionResult};

use crate::error::Result;
use crate::numerics::{ColumnMatrix, PNorm};
use crate::scalar::Scalar;

/// The `ℓ_{p,2}` subroutine run at the end of the streaming and distributed
/// pipelines.
#[derive(Debug, Clone, Copy)]
pub enum Subroutine {
    Regular(RegularConfig),
    Greedy(GreedyConfig),
}

impl Subroutine {
    pub fn regular() -> Self {
        Subroutine::Regular(RegularConfig::default())
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Subroutine::Regular(_) => Algorithm::Regular,
            Subroutine::Greedy(_) => Algorithm::Greedy,
        }
    }

    pub fn run<T: Scalar>(
        &self,
        a: &ColumnMatrix<T>,
        k: usize,
        p: PNorm,
        seed: u64,
    ) -> Result<SelectionResult<T>> {
        match self {
            Subroutine::Regular(cfg) => regular_css_p2(a, k.min(a.cols()), p, cfg, seed),
            Subroutine::Greedy(cfg) => greedy_css_p2(a, k, p, cfg, seed),
        }
    }
}
