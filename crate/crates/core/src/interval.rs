//! Outward-rounded interval arithmetic.
//!
//! Directed rounding is not available portably, so every elementary
//! operation is evaluated in round-to-nearest and its endpoints are then
//! pushed outward by [`INFLATION_ULPS`] units in the last place. The same
//! inflation is applied to `exp` and `ln`, whose platform implementations
//! are accurate to well under one ulp. Powers go through `exp(e * ln(x))`.
//!
//! The invariant maintained by every operation is that the exact real result
//! of the operation applied to any points of the operand intervals lies in
//! `[lo, hi]`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::real::Real;

/// Number of ulps each endpoint is moved outward after every operation.
pub const INFLATION_ULPS: u32 = 4;

#[inline]
fn down(mut x: f64) -> f64 {
    for _ in 0..INFLATION_ULPS {
        x = x.next_down();
    }
    x
}

#[inline]
fn up(mut x: f64) -> f64 {
    for _ in 0..INFLATION_ULPS {
        x = x.next_up();
    }
    x
}

#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Builds `[lo, hi]`.
    ///
    /// # Panics
    ///
    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// A thin interval holding exactly the binary64 value `x`.
    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Smallest interval containing both operands.
    pub fn hull(self, other: Interval) -> Self {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    fn outward(lo: f64, hi: f64) -> Self {
        Interval::new(down(lo), up(hi))
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval::outward(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval::outward(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;

    // exact, no inflation needed
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::outward(lo, hi)
    }
}

impl Div for Interval {
    type Output = Interval;

    /// # Panics
    ///
    /// Panics if the divisor contains zero.
    fn div(self, rhs: Interval) -> Interval {
        assert!(
            rhs.lo > 0.0 || rhs.hi < 0.0,
            "interval division by an interval containing zero: {rhs:?}"
        );
        let p = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::outward(lo, hi)
    }
}

impl Real for Interval {
    fn from_f64(x: f64) -> Self {
        Interval::point(x)
    }

    fn exp(self) -> Self {
        let lo = down(self.lo.exp()).max(0.0);
        Interval::new(lo, up(self.hi.exp()))
    }

    /// # Panics
    ///
    /// Panics unless the interval is strictly positive.
    fn ln(self) -> Self {
        assert!(self.lo > 0.0, "ln of non-positive interval {self:?}");
        Interval::outward(self.lo.ln(), self.hi.ln())
    }

    fn pow_pos(self, e: Self) -> Self {
        debug_assert!(self.lo >= 0.0 && e.lo > 0.0);
        if self.hi == 0.0 {
            return Interval::point(0.0);
        }
        if self.lo == 0.0 {
            // x^e is increasing in x for e > 0; the upper end comes from hi.
            let upper = Interval::point(self.hi).pow_pos(e);
            return Interval::new(0.0, upper.hi);
        }
        (e * self.ln()).exp()
    }

    fn sqr(self) -> Self {
        if self.lo >= 0.0 {
            Interval::outward(self.lo * self.lo, self.hi * self.hi)
        } else if self.hi <= 0.0 {
            Interval::outward(self.hi * self.hi, self.lo * self.lo)
        } else {
            let m = self.lo.abs().max(self.hi.abs());
            Interval::new(0.0, up(m * m))
        }
    }
}
