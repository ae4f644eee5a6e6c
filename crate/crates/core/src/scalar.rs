//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the whole toolkit is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from an `f64` literal or sample.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::lit(v as f64)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Logistic function `1 / (1 + e^{-z})`, evaluated without overflow.
#[inline]
pub fn logistic<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// `ln(1 + e^z)`; its derivative is [`logistic`].
#[inline]
pub fn softplus<T: Scalar>(z: T) -> T {
    if z > T::lit(30.0) {
        z
    } else if z < T::lit(-30.0) {
        z.exp()
    } else {
        z.exp().ln_1p()
    }
}

/// Inverse of [`logistic`] for `p` in the open unit interval.
#[inline]
pub fn logit<T: Scalar>(p: T) -> T {
    (p / (T::one() - p)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_is_symmetric_and_stable() {
        assert_eq!(logistic(0.0_f64), 0.5);
        assert!((logistic(3.0_f64) + logistic(-3.0) - 1.0).abs() < 1e-15);
        assert_eq!(logistic(-800.0_f64), 0.0);
        assert_eq!(logistic(800.0_f64), 1.0);
    }

    #[test]
    fn softplus_matches_naive_form() {
        for &z in &[-5.0_f64, -0.3, 0.0, 0.7, 4.0] {
            assert!((softplus(z) - (1.0 + z.exp()).ln()).abs() < 1e-14);
        }
        assert_eq!(softplus(100.0_f32), 100.0);
    }

    #[test]
    fn logit_inverts_logistic() {
        for &p in &[0.01_f64, 0.3, 0.5, 0.9] {
            assert!((logistic(logit(p)) - p).abs() < 1e-14);
        }
    }
}
