//! Floating-point abstraction for the numeric kernels.
//!
//! The scoring and fusion math (BM25, cosine similarity, reciprocal-rank
//! fusion, expression evaluation) is written once, generic over [`Real`],
//! and instantiated at `f32` for storage-heavy paths and `f64` everywhere
//! precision matters. Pipeline data structures keep concrete types; only
//! the kernels are generic.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable by the numeric kernels.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Copy + Send + Sync + 'static
{
    /// Lossy conversion from `f64` (panics only if the target type cannot
    /// represent any approximation, which cannot happen for f32/f64).
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }
    /// Lossy widening to `f64`.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("f64 conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_squares<F: Real>(xs: &[F]) -> F {
        xs.iter().fold(F::zero(), |acc, &x| acc + x * x)
    }

    #[test]
    fn works_for_both_widths() {
        assert_eq!(sum_of_squares(&[1.0f32, 2.0]), 5.0f32);
        assert_eq!(sum_of_squares(&[1.0f64, 2.0]), 5.0f64);
        assert_eq!(f32::from_f64_lossy(0.5).to_f64_lossy(), 0.5);
    }
}
