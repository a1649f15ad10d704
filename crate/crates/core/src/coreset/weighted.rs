use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{mismatch, CssError, Result};
use crate::numerics::{ColumnMatrix, PNorm};
use crate::scalar::Scalar;

/// A reweighted subset of sketched columns together with the unsketched
/// source columns they came from.
///
/// Column `j` of `sketched` equals the sketch of source column
/// `global_indices[j]` times `weights[j]`; column `j` of `originals` is that
/// source column as it appeared in the input, without any weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedColumnSet<T> {
    pub sketched: ColumnMatrix<T>,
    pub originals: ColumnMatrix<T>,
    pub global_indices: Vec<usize>,
    pub weights: Vec<T>,
    pub p: PNorm,
    /// Seeds of every sampling step this set went through, oldest first.
    pub lineage: Vec<u64>,
}

const MAGIC: &[u8; 8] = b"LPCSWCS1";

impl<T: Scalar> WeightedColumnSet<T> {
    /// Unit-weight set over raw columns.
    pub fn from_columns(
        sketched: ColumnMatrix<T>,
        originals: ColumnMatrix<T>,
        global_indices: Vec<usize>,
        p: PNorm,
    ) -> Result<Self> {
        let n = sketched.cols();
        let set = Self {
            sketched,
            originals,
            global_indices,
            weights: vec![T::one(); n],
            p,
            lineage: Vec::new(),
        };
        set.validate()?;
        Ok(set)
    }

    pub fn empty(sketched_rows: usize, original_rows: usize, p: PNorm) -> Self {
        Self {
            sketched: ColumnMatrix::zeros(sketched_rows, 0),
            originals: ColumnMatrix::zeros(original_rows, 0),
            global_indices: Vec::new(),
            weights: Vec::new(),
            p,
            lineage: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.global_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.global_indices.is_empty()
    }

    pub fn sketched_rows(&self) -> usize {
        self.sketched.rows()
    }

    pub fn original_rows(&self) -> usize {
        self.originals.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.global_indices.len();
        if self.sketched.cols() != n || self.originals.cols() != n || self.weights.len() != n {
            return Err(mismatch(format!(
                "coreset parts disagree: sketched {}, originals {}, indices {n}, weights {}",
                self.sketched.cols(),
                self.originals.cols(),
                self.weights.len()
            )));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w > T::zero())) {
            return Err(CssError::InvalidParameter(
                "coreset weights must be positive and finite".into(),
            ));
        }
        Ok(())
    }

    /// Column-wise concatenation without resampling.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(mismatch("coresets built for different p"));
        }
        let mut global_indices = self.global_indices.clone();
        global_indices.extend_from_slice(&other.global_indices);
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&other.weights);
        let mut lineage = self.lineage.clone();
        lineage.extend_from_slice(&other.lineage);
        Ok(Self {
            sketched: self.sketched.hstack(&other.sketched)?,
            originals: self.originals.hstack(&other.originals)?,
            global_indices,
            weights,
            p: self.p,
            lineage,
        })
    }

    /// Keeps the columns at `picks` (repetition allowed), multiplying each
    /// kept column's weight by the matching `factors` entry.
    pub fn resample(&self, picks: &[usize], factors: &[T], seed: u64) -> Self {
        debug_assert_eq!(picks.len(), factors.len());
        let mut sketched = self.sketched.select_columns(picks);
        for (j, &f) in factors.iter().enumerate() {
            sketched.scale_column(j, f);
        }
        let mut lineage = self.lineage.clone();
        lineage.push(seed);
        Self {
            sketched,
            originals: self.originals.select_columns(picks),
            global_indices: picks.iter().map(|&i| self.global_indices[i]).collect(),
            weights: picks
                .iter()
                .zip(factors)
                .map(|(&i, &f)| self.weights[i] * f)
                .collect(),
            p: self.p,
            lineage,
        }
    }

    /// Words to store or ship the set: each column carries its sketched and
    /// original entries plus one index and one weight.
    pub fn words(&self) -> usize {
        self.len() * (self.sketched_rows() + self.original_rows() + 2)
    }

    /// Self-describing little-endian record: magic, p, dims, lineage,
    /// indices, weights, then both matrices column-major as `f64`.
    pub fn write_record<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_f64::<LittleEndian>(self.p.value())?;
        w.write_u64::<LittleEndian>(self.sketched_rows() as u64)?;
        w.write_u64::<LittleEndian>(self.original_rows() as u64)?;
        w.write_u64::<LittleEndian>(self.len() as u64)?;
        w.write_u64::<LittleEndian>(self.lineage.len() as u64)?;
        for &s in &self.lineage {
            w.write_u64::<LittleEndian>(s)?;
        }
        for &i in &self.global_indices {
            w.write_u64::<LittleEndian>(i as u64)?;
        }
        for &x in &self.weights {
            w.write_f64::<LittleEndian>(x.f64())?;
        }
        for &x in self.sketched.as_slice().iter().chain(self.originals.as_slice()) {
            w.write_f64::<LittleEndian>(x.f64())?;
        }
        Ok(())
    }

    pub fn to_record(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_record(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_record<R: Read>(mut r: R) -> Result<Self> {
        let parse = |offset: &str, e: std::io::Error| CssError::Parse {
            location: format!("coreset record {offset}"),
            message: e.to_string(),
        };
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|e| parse("magic", e))?;
        if &magic != MAGIC {
            return Err(CssError::Parse {
                location: "coreset record magic".into(),
                message: "not a coreset record".into(),
            });
        }
        let p = PNorm::new(r.read_f64::<LittleEndian>().map_err(|e| parse("p", e))?)?;
        let mut dims = [0usize; 4];
        for d in &mut dims {
            *d = r.read_u64::<LittleEndian>().map_err(|e| parse("header", e))? as usize;
        }
        let [srows, orows, n, nl] = dims;
        let mut read_u64s = |count: usize, what: &str| -> Result<Vec<u64>> {
            (0..count)
                .map(|_| r.read_u64::<LittleEndian>().map_err(|e| parse(what, e)))
                .collect()
        };
        let lineage = read_u64s(nl, "lineage")?;
        let global_indices = read_u64s(n, "indices")?.into_iter().map(|i| i as usize).collect();
        let mut read_f64s = |count: usize, what: &str| -> Result<Vec<T>> {
            (0..count)
                .map(|_| r.read_f64::<LittleEndian>().map(T::of).map_err(|e| parse(what, e)))
                .collect()
        };
        let weights = read_f64s(n, "weights")?;
        let sketched = ColumnMatrix::from_col_major(srows, n, read_f64s(srows * n, "sketched")?)?;
        let originals = ColumnMatrix::from_col_major(orows, n, read_f64s(orows * n, "originals")?)?;
        let set = Self {
            sketched,
            originals,
            global_indices,
            weights,
            p,
            lineage,
        };
        set.validate()?;
        Ok(set)
    }
}
