use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic shared by plain `f64` evaluation and outward-rounded
/// interval evaluation.
///
/// Every closed form in [`crate::scalar`] is written once against this trait.
/// Powers are restricted to nonnegative bases and positive exponents, which
/// is all the closed forms need.
pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    /// `self^e` for `self >= 0` and `e > 0`; `0^e = 0`.
    fn pow_pos(self, e: Self) -> Self;

    fn sqr(self) -> Self {
        self * self
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }

    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }

    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }

    #[inline]
    fn pow_pos(self, e: Self) -> Self {
        if self == 0.0 {
            0.0
        } else {
            self.powf(e)
        }
    }
}
