use crate::coreset::{merge_coresets, CoresetOptions, WeightedColumnSet};
use crate::error::{CssError, Result};
use crate::scalar::Scalar;

/// Merge-and-reduce frontier: coresets tagged with their tree level.
///
/// At quiescent points levels strictly decrease from front to back, so at
/// most one coreset is stored per level and the stored count after `b`
/// full batches is `popcount(b)`.
#[derive(Debug, Clone)]
pub struct LevelledCoresetStack<T> {
    entries: Vec<(WeightedColumnSet<T>, usize)>,
}

impl<T: Scalar> Default for LevelledCoresetStack<T> {
    fn default() -> Self {
        Self { entries: Vec::new() }
    }
}

impl<T: Scalar> LevelledCoresetStack<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, set: WeightedColumnSet<T>, level: usize) {
        self.entries.push((set, level));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn levels(&self) -> Vec<usize> {
        self.entries.iter().map(|(_, l)| *l).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &(WeightedColumnSet<T>, usize)> {
        self.entries.iter()
    }

    pub fn stored_columns(&self) -> usize {
        self.entries.iter().map(|(s, _)| s.len()).sum()
    }

    pub fn stored_words(&self) -> usize {
        self.entries.iter().map(|(s, _)| s.words()).sum()
    }

    /// While the last two entries share a level, replaces them with a
    /// coreset of their union one level up. `next_seed` supplies one seed
    /// per merge. Returns the number of merges performed.
    pub fn recursive_merge(
        &mut self,
        opts: &CoresetOptions,
        mut next_seed: impl FnMut() -> u64,
    ) -> Result<usize> {
        if self.entries.is_empty() {
            return Err(CssError::Empty("recursive merge on an empty list".into()));
        }
        let mut merges = 0;
        while self.entries.len() >= 2 {
            let last = self.entries.len() - 1;
            if self.entries[last - 1].1 != self.entries[last].1 {
                break;
            }
            let (right, level) = self.entries.pop().unwrap();
            let (left, _) = self.entries.pop().unwrap();
            let merged = merge_coresets(&left, &right, opts, next_seed())?;
            self.entries.push((merged, level + 1));
            merges += 1;
        }
        Ok(merges)
    }

    /// Column-wise concatenation of every stored coreset, front to back.
    pub fn concatenated(&self) -> Result<WeightedColumnSet<T>> {
        let mut it = self.entries.iter();
        let Some((first, _)) = it.next() else {
            return Err(CssError::Empty("no coresets stored".into()));
        };
        it.try_fold(first.clone(), |acc, (s, _)| acc.concat(s))
    }
}
