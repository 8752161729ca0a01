//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point score type: `f32` or `f64`.
///
/// Rates (FAR, FRR, EER) are computed in the same type as the scores they
/// are derived from.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FromStr
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossless widening used for hashing and reporting.
    fn to_f64_lossless(self) -> f64;

    /// Narrowing conversion from `f64`; rounds to nearest for `f32`.
    fn from_f64_lossy(v: f64) -> Self;

    /// Exact conversion of a count, used as the numerator/denominator of rates.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    /// Bit pattern used to key threshold caches. `-0.0` and `0.0` share a key.
    fn cache_key(self) -> u64 {
        let v = self.to_f64_lossless();
        if v == 0.0 {
            0.0f64.to_bits()
        } else {
            v.to_bits()
        }
    }
}

impl Scalar for f32 {
    fn to_f64_lossless(self) -> f64 {
        self as f64
    }
    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }
}

impl Scalar for f64 {
    fn to_f64_lossless(self) -> f64 {
        self
    }
    fn from_f64_lossy(v: f64) -> Self {
        v
    }
}

/// Shorthand for `T::from_f64_lossy(v)`.
#[inline]
pub(crate) fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64_lossy(v)
}
