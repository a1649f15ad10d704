use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::numerics::ColumnMatrix;
use crate::scalar::Scalar;

/// Which selection routine produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Regular,
    Greedy,
    Uniform,
    Svd,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Regular => "regular",
            Algorithm::Greedy => "greedy",
            Algorithm::Uniform => "uniform",
            Algorithm::Svd => "svd",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = crate::CssError;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "regular" => Ok(Algorithm::Regular),
            "greedy" => Ok(Algorithm::Greedy),
            "uniform" => Ok(Algorithm::Uniform),
            "svd" => Ok(Algorithm::Svd),
            other => Err(crate::CssError::InvalidParameter(format!(
                "unknown algorithm '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionMeta {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
    /// Set when the routine stopped before producing the requested count.
    pub truncated: bool,
}

/// Outcome of a column selection.
///
/// `indices` name columns of whatever matrix the caller considers the
/// source: local columns for the offline routines, global stream or
/// dataset positions for the streaming and distributed pipelines.
/// `err_p2` is the exact `ℓ_{p,2}` projection cost on the matrix the
/// selection was computed from; `err_p` is the entrywise `ℓp` fit error
/// of the selected columns against the full input when it was evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult<T> {
    pub indices: Vec<usize>,
    pub left_factor: ColumnMatrix<T>,
    pub right_factor: Option<ColumnMatrix<T>>,
    pub err_p2: T,
    pub err_p: Option<T>,
    /// Greedy only: `err_p2` after each committed column.
    pub err_history: Vec<T>,
    /// Greedy only: utility `Φ` after each committed column.
    pub utility_history: Vec<T>,
    pub meta: SelectionMeta,
}

/// Flat, serializable summary of a [`SelectionResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub indices: Vec<usize>,
    pub err_p2: f64,
    pub err_p: Option<f64>,
    pub params: BTreeMap<String, String>,
    pub truncated: bool,
}

impl<T: Scalar> SelectionResult<T> {
    pub fn report(&self) -> SelectionReport {
        SelectionReport {
            algorithm: self.meta.algorithm,
            seed: self.meta.seed,
            indices: self.indices.clone(),
            err_p2: self.err_p2.f64(),
            err_p: self.err_p.map(|e| e.f64()),
            params: self.meta.params.clone(),
            truncated: self.meta.truncated,
        }
    }

    /// Selected indices with duplicates removed, first occurrence order.
    pub fn distinct_indices(&self) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        self.indices.iter().copied().filter(|i| seen.insert(*i)).collect()
    }
}
