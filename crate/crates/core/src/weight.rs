//! Cost scalar used by every planner in the crate.
//!
//! Grid distances are fixed-point integers (a cardinal step is 1000, a
//! diagonal step 1414), so all comparisons are exact. Any unsigned primitive
//! integer works; `u64` is the default through [`crate::Cost`].
//!
//! The maximum representable value is reserved as the "unreachable"
//! sentinel. It absorbs additions instead of wrapping around.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{Bounded, FromPrimitive, PrimInt, ToPrimitive, Unsigned};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Weight:
    PrimInt + Unsigned + Bounded + FromPrimitive + ToPrimitive + Hash + Debug + Display + Default + Send + Sync + Serialize + DeserializeOwned + 'static
{
    /// Sentinel for "no path".
    #[inline]
    fn infinity() -> Self {
        Self::max_value()
    }

    #[inline]
    fn is_infinite(self) -> bool {
        self == Self::max_value()
    }

    #[inline]
    fn is_finite(self) -> bool {
        self != Self::max_value()
    }

    /// Addition that never overflows. Infinity is absorbing; finite sums that
    /// would overflow saturate just below the sentinel so they stay finite.
    #[inline]
    fn guarded_add(self, rhs: Self) -> Self {
        if self.is_infinite() || rhs.is_infinite() {
            return Self::infinity();
        }
        match self.checked_add(&rhs) {
            Some(s) if s.is_finite() => s,
            _ => Self::max_value() - Self::one(),
        }
    }

    /// Lossy conversion for reporting and the focal bound.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Converts a grid step cost. Values that do not fit saturate below the
    /// sentinel.
    #[inline]
    fn from_u64_saturating(v: u64) -> Self {
        match Self::from_u64(v) {
            Some(w) if w.is_finite() => w,
            _ => Self::max_value() - Self::one(),
        }
    }
}

impl<T> Weight for T where
    T: PrimInt + Unsigned + Bounded + FromPrimitive + ToPrimitive + Hash + Debug + Display + Default + Send + Sync + Serialize + DeserializeOwned + 'static
{
}

/// Sums a sequence of weights with [`Weight::guarded_add`].
pub fn guarded_sum<W: Weight, I: IntoIterator<Item = W>>(it: I) -> W {
    it.into_iter().fold(W::zero(), W::guarded_add)
}

/// Largest weight `b` with `b <= (1 + eps) * f_min`, the upper edge of the
/// focal window. Never below `f_min` itself.
pub fn focal_bound<W: Weight>(f_min: W, eps: f64) -> W {
    if f_min.is_infinite() || eps <= 0.0 {
        return f_min;
    }
    let scaled = (1.0 + eps) * f_min.as_f64();
    if scaled >= W::max_value().as_f64() {
        return W::max_value() - W::one();
    }
    // Exact for weights below 2^53, which covers every grid-derived cost.
    let b = W::from_f64(scaled.floor()).unwrap_or(f_min);
    if b < f_min {
        f_min
    } else {
        b
    }
}
