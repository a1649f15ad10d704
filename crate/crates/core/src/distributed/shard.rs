use crate::error::{invalid, mismatch, Result};
use crate::numerics::ColumnMatrix;
use crate::scalar::Scalar;

/// Columns held by one server, with their positions in the global matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ServerShard<T> {
    pub id: usize,
    pub data: ColumnMatrix<T>,
    pub global_indices: Vec<usize>,
}

impl<T: Scalar> ServerShard<T> {
    pub fn new(id: usize, data: ColumnMatrix<T>, global_indices: Vec<usize>) -> Result<Self> {
        if data.cols() != global_indices.len() {
            return Err(mismatch(format!(
                "shard {id} holds {} columns but {} indices",
                data.cols(),
                global_indices.len()
            )));
        }
        Ok(Self {
            id,
            data,
            global_indices,
        })
    }

    pub fn len(&self) -> usize {
        self.data.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.cols() == 0
    }

    /// First global index, for contiguous shards.
    pub fn offset(&self) -> Option<usize> {
        self.global_indices.first().copied()
    }
}

/// Splits the columns of `a` into `s` contiguous blocks whose sizes differ
/// by at most one. Trailing shards are empty when `s > n`.
pub fn partition_contiguous<T: Scalar>(a: &ColumnMatrix<T>, s: usize) -> Result<Vec<ServerShard<T>>> {
    if s == 0 {
        return Err(invalid("at least one server is required"));
    }
    let n = a.cols();
    let (base, extra) = (n / s, n % s);
    let mut start = 0;
    (0..s)
        .map(|id| {
            let len = base + usize::from(id < extra);
            let idx: Vec<usize> = (start..start + len).collect();
            start += len;
            ServerShard::new(id, a.select_columns(&idx), idx)
        })
        .collect()
}

/// Sends column `j` to server `assignment[j]`. Columns keep their global
/// order within each shard.
pub fn partition_by_assignment<T: Scalar>(
    a: &ColumnMatrix<T>,
    assignment: &[usize],
    s: usize,
) -> Result<Vec<ServerShard<T>>> {
    if s == 0 {
        return Err(invalid("at least one server is required"));
    }
    if assignment.len() != a.cols() {
        return Err(mismatch(format!(
            "assignment lists {} columns, matrix has {}",
            assignment.len(),
            a.cols()
        )));
    }
    let mut groups = vec![Vec::new(); s];
    for (j, &srv) in assignment.iter().enumerate() {
        if srv >= s {
            return Err(invalid(format!("column {j} assigned to server {srv} of {s}")));
        }
        groups[srv].push(j);
    }
    groups
        .into_iter()
        .enumerate()
        .map(|(id, idx)| ServerShard::new(id, a.select_columns(&idx), idx))
        .collect()
}
