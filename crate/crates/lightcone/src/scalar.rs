//! Scalar abstraction for circuit angles and simulator amplitudes.
//!
//! Everything structural (circuits, cones, grouping, native rewriting) and the
//! dense statevector work for any [`Scalar`]; `f64` is the default everywhere
//! and the only type exercised by the stochastic and I/O layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// A real floating-point scalar usable for angles and amplitudes.
///
/// The bound set is the intersection of what the circuit IR (angle
/// arithmetic), the statevector simulator (complex arithmetic, sums over
/// amplitudes), and serialization (conversion through `f64`) require.
pub trait Scalar:
    Float + FloatConst + NumAssign + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used when instantiating built-in problem
    /// definitions (whose coefficients are written as `f64` literals).
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 must convert into a Scalar")
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_scalar<S: Scalar>() {}

    #[test]
    fn f32_and_f64_are_scalars() {
        assert_scalar::<f32>();
        assert_scalar::<f64>();
    }

    #[test]
    fn lossy_conversion_round_trips_for_f64() {
        assert_eq!(f64::from_f64_lossy(0.25), 0.25);
        assert_eq!(f32::from_f64_lossy(0.5), 0.5f32);
    }
}
