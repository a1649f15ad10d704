//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
///
/// Randomness is always drawn in `f64` and converted, so a sketch built for
/// `f32` uses the same underlying draws as its `f64` counterpart.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    fn of(x: f64) -> Self;

    /// Lossy conversion to `f64`.
    fn f64(self) -> f64;
}

macro_rules! impl_scalar {
    ( $( $t:ident ),* ) => {
        $(
            impl Scalar for $t {
                #[inline]
                fn of(x: f64) -> $t {
                    x as $t
                }
                #[inline]
                fn f64(self) -> f64 {
                    self as f64
                }
            }
        )*
    };
}

impl_scalar!(f32, f64);
