use std::collections::BTreeMap;

use crate::coreset::{lewis_sample, lewis_weights, LewisOptions};
use crate::css::{Algorithm, SelectionMeta, SelectionResult};
use crate::error::{invalid, Result};
use crate::numerics::{projection_cost_p2, pseudoinverse, ColumnMatrix, PNorm};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::sketch::SparseEmbedding;

/// Parameters of the bi-criteria Lewis-weight selection. `None` picks the
/// experiment defaults: `m = s = ⌈k/2⌉`, `t' = k`.
#[derive(Debug, Clone, Copy)]
pub struct RegularConfig {
    pub embedding_rows: Option<usize>,
    pub sparsity: Option<usize>,
    pub t_prime: Option<usize>,
    /// Scale selected columns by their sampling factors (`U = A S'`).
    pub rescale: bool,
    /// Drop repeated samples after selection.
    pub dedup: bool,
    pub compute_right_factor: bool,
    pub lewis: LewisOptions,
}

impl Default for RegularConfig {
    fn default() -> Self {
        Self {
            embedding_rows: None,
            sparsity: None,
            t_prime: None,
            rescale: false,
            dedup: false,
            compute_right_factor: true,
            lewis: LewisOptions::default(),
        }
    }
}

impl RegularConfig {
    pub fn resolved(&self, k: usize) -> (usize, usize, usize) {
        let half = k.div_ceil(2).max(1);
        let m = self.embedding_rows.unwrap_or(half).max(1);
        let s = self.sparsity.unwrap_or(half).clamp(1, m);
        (m, s, self.t_prime.unwrap_or(k).max(1))
    }

    /// Theory-side output count `k ⌈log₂ k⌉²`.
    pub fn theory_t_prime(k: usize) -> usize {
        let l = (k.max(2) as f64).log2().ceil() as usize;
        k * l * l
    }
}

/// Bi-criteria `k`-CSS in the `ℓ_{p,2}` norm: sparse-embed the rows, sample
/// `t'` columns by the `ℓp` Lewis weights of the embedded columns, and fit
/// `V = U⁺ A`.
pub fn regular_css_p2<T: Scalar>(
    a: &ColumnMatrix<T>,
    k: usize,
    p: PNorm,
    cfg: &RegularConfig,
    seed: u64,
) -> Result<SelectionResult<T>> {
    let (d, n) = a.shape();
    if k == 0 || k > n {
        return Err(invalid(format!("k = {k} outside [1, {n}]")));
    }
    let (m, s, t_prime) = cfg.resolved(k);
    let embedding = SparseEmbedding::new(m, d, s, derive_seed(seed, "embedding", 0))?;
    let embedded = embedding.apply(a)?;
    let lw = lewis_weights(&embedded.transpose(), p.value(), &cfg.lewis)?;
    // Columns annihilated by the embedding carry no weight; fall back to
    // uniform sampling when every column is annihilated.
    let weights = if lw.total() > T::zero() {
        lw.weights.clone()
    } else {
        vec![T::one(); n]
    };
    let (mut picks, mut factors) =
        lewis_sample(&weights, t_prime, p, derive_seed(seed, "sample", 0))?;
    if cfg.dedup {
        let mut seen = std::collections::HashSet::new();
        let keep: Vec<bool> = picks.iter().map(|i| seen.insert(*i)).collect();
        let mut it = keep.iter();
        picks.retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        factors.retain(|_| *it.next().unwrap());
    }

    let mut u = a.select_columns(&picks);
    if cfg.rescale {
        for (j, &f) in factors.iter().enumerate() {
            u.scale_column(j, f);
        }
    }
    let err_p2 = projection_cost_p2(&u, a, p)?;
    let right_factor = if cfg.compute_right_factor {
        Some(pseudoinverse(&u).matmul(a)?)
    } else {
        None
    };

    let mut params = BTreeMap::new();
    params.insert("k".into(), k.to_string());
    params.insert("p".into(), p.to_string());
    params.insert("embedding_rows".into(), m.to_string());
    params.insert("sparsity".into(), s.to_string());
    params.insert("t_prime".into(), t_prime.to_string());
    params.insert("rescale".into(), cfg.rescale.to_string());
    params.insert("dedup".into(), cfg.dedup.to_string());
    params.insert("lewis_residual".into(), format!("{:e}", lw.residual.f64()));

    Ok(SelectionResult {
        indices: picks,
        left_factor: u,
        right_factor,
        err_p2,
        err_p: None,
        err_history: Vec::new(),
        utility_history: Vec::new(),
        meta: SelectionMeta {
            algorithm: Algorithm::Regular,
            seed,
            params,
            truncated: false,
        },
    })
}
