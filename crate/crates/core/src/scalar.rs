//! Scalar abstraction for the math core.
//!
//! Everything numeric in this crate is generic over [`Scalar`] so the same
//! kernels run in f32 or f64. The pipeline pins f64 through the aliases at
//! the crate root; gradient checks rely on that precision.

use std::fmt::{Debug, Display};
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point element type of tensors: f32 or f64.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + AddAssign + Debug + Display + Default + 'static
{
    /// Lift an f64 literal into this scalar type.
    fn from_f(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Lossy view as f64 (exact for f32 and f64).
    fn to_f(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_squares<F: Scalar>(xs: &[F]) -> F {
        xs.iter().fold(F::zero(), |a, &x| a + x * x)
    }

    #[test]
    fn generic_kernel_runs_in_both_widths() {
        assert_eq!(sum_of_squares(&[3.0f64, 4.0]), 25.0);
        assert_eq!(sum_of_squares(&[3.0f32, 4.0]), 25.0);
    }

    #[test]
    fn literal_roundtrip() {
        assert_eq!(f64::from_f(0.5).to_f(), 0.5);
        assert_eq!(f32::from_f(0.5).to_f(), 0.5);
    }
}
