use std::f64::consts::FRAC_PI_2;

use rand::Rng as _;

use crate::error::{invalid, mismatch, Result};
use crate::numerics::{ColumnMatrix, PNorm};
use crate::rng::{rng_from_seed, Rng};
use crate::scalar::Scalar;
use crate::sketch::{SketchDescriptor, SketchKind};

/// Chambers-Mallows-Stuck transform of an angle `theta ∈ (-π/2, π/2)` and a
/// uniform `r ∈ (0, 1)` into a standard symmetric `p`-stable value.
pub fn p_stable_from_uniforms(p: f64, theta: f64, r: f64) -> f64 {
    let lead = (p * theta).sin() / theta.cos().powf(1.0 / p);
    let exponent = (1.0 - p) / p;
    if exponent == 0.0 {
        return lead;
    }
    let tail = ((theta * (1.0 - p)).cos() / (1.0 / r).ln()).powf(exponent);
    lead * tail
}

/// One standard `p`-stable draw. Edge draws `theta = ±π/2` and `r ∈ {0, 1}`
/// are resampled.
pub fn sample_p_stable(p: PNorm, rng: &mut Rng) -> f64 {
    loop {
        let theta = (rng.gen::<f64>() - 0.5) * std::f64::consts::PI;
        let r: f64 = rng.gen();
        if theta.abs() >= FRAC_PI_2 || r <= 0.0 || r >= 1.0 {
            continue;
        }
        let x = p_stable_from_uniforms(p.value(), theta, r);
        if x.is_finite() {
            return x;
        }
    }
}

/// Dense `t x d` sketch of i.i.d. standard `p`-stable entries scaled by
/// `c / t^{1/p}`. Only `(t, d, p, seed, c)` identifies it; the entries are
/// regenerated deterministically.
#[derive(Clone)]
pub struct PStableSketch<T> {
    descriptor: SketchDescriptor,
    entries: ColumnMatrix<T>,
}

impl<T: Scalar> PStableSketch<T> {
    pub fn new(t: usize, d: usize, p: PNorm, seed: u64, scale: f64) -> Result<Self> {
        if t == 0 || d == 0 {
            return Err(invalid("sketch dimensions must be positive"));
        }
        let mut rng = rng_from_seed(seed);
        let factor = scale / (t as f64).powf(1.0 / p.value());
        // Column-major fill from a single stream.
        let entries =
            ColumnMatrix::from_fn(t, d, |_, _| T::of(factor * sample_p_stable(p, &mut rng)));
        Ok(Self {
            descriptor: SketchDescriptor {
                kind: SketchKind::PStable,
                rows: t,
                cols: d,
                p: p.value(),
                sparsity: 0,
                seed,
                scale,
            },
            entries,
        })
    }

    /// Identity-shaped sketch for tests and pass-through experiments.
    pub fn identity(d: usize) -> Self {
        Self {
            descriptor: SketchDescriptor {
                kind: SketchKind::Identity,
                rows: d,
                cols: d,
                p: 1.0,
                sparsity: 0,
                seed: 0,
                scale: 1.0,
            },
            entries: ColumnMatrix::identity(d),
        }
    }

    pub fn descriptor(&self) -> &SketchDescriptor {
        &self.descriptor
    }

    pub fn rows(&self) -> usize {
        self.entries.rows()
    }

    pub fn cols(&self) -> usize {
        self.entries.cols()
    }

    pub fn entries(&self) -> &ColumnMatrix<T> {
        &self.entries
    }

    pub fn apply(&self, a: &ColumnMatrix<T>) -> Result<ColumnMatrix<T>> {
        self.entries.matmul(a)
    }

    pub fn apply_column(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols() {
            return Err(mismatch(format!(
                "column of length {} for a sketch over {} rows",
                x.len(),
                self.cols()
            )));
        }
        Ok(self.entries.mul_vec(x))
    }
}
