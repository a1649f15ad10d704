use crate::error::{CssError, Result};
use crate::numerics::{ColumnMatrix, PNorm};
use crate::scalar::Scalar;

/// Euclidean norm with scaling against overflow.
pub fn l2<T: Scalar>(x: &[T]) -> T {
    let scale = x.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    let s: T = x.iter().map(|&v| (v / scale) * (v / scale)).sum();
    scale * s.sqrt()
}

/// `(Σ |x_i|^p)^{1/p}` for a plain vector.
pub fn vector_lp<T: Scalar>(x: &[T], p: PNorm) -> T {
    let p: T = p.get();
    let s: T = x.iter().map(|&v| v.abs().powf(p)).sum();
    s.powf(T::one() / p)
}

fn nonempty<T: Scalar>(a: &ColumnMatrix<T>) -> Result<()> {
    if a.is_empty() {
        Err(CssError::Empty("matrix has no columns".into()))
    } else {
        Ok(())
    }
}

/// Entrywise `||A||_p = (Σ_ij |A_ij|^p)^{1/p}`.
pub fn entrywise_lp_norm<T: Scalar>(a: &ColumnMatrix<T>, p: PNorm) -> Result<T> {
    nonempty(a)?;
    let pp: T = p.get();
    let s: T = a.as_slice().iter().map(|&v| v.abs().powf(pp)).sum();
    Ok(s.powf(T::one() / pp))
}

/// `||A||_{p,2} = (Σ_j ||A_{*j}||_2^p)^{1/p}`.
pub fn lp2_norm<T: Scalar>(a: &ColumnMatrix<T>, p: PNorm) -> Result<T> {
    nonempty(a)?;
    Ok(lp_of_values(a.columns().map(l2), p))
}

/// `(Σ v^p)^{1/p}` over nonnegative values.
pub fn lp_of_values<T: Scalar>(values: impl Iterator<Item = T>, p: PNorm) -> T {
    let pp: T = p.get();
    let s: T = values.map(|v| v.powf(pp)).sum();
    s.powf(T::one() / pp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norms() {
        let i2 = ColumnMatrix::<f64>::identity(2);
        assert_eq!(entrywise_lp_norm(&i2, PNorm::ONE).unwrap(), 2.0);
        assert_eq!(lp2_norm(&i2, PNorm::ONE).unwrap(), 2.0);
    }

    #[test]
    fn zero_matrix_is_zero() {
        let z = ColumnMatrix::<f64>::zeros(3, 3);
        assert_eq!(entrywise_lp_norm(&z, PNorm::new(1.5).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn single_column_euclidean() {
        let a = ColumnMatrix::from_rows(&[vec![3.0, 0.0], vec![4.0, 0.0]]).unwrap();
        assert_eq!(lp2_norm(&a, PNorm::ONE).unwrap(), 5.0);
    }

    #[test]
    fn empty_matrix_rejected() {
        let a = ColumnMatrix::<f64>::zeros(3, 0);
        assert!(entrywise_lp_norm(&a, PNorm::ONE).is_err());
    }
}
