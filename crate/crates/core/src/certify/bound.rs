use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::real::Real;
use crate::scalar::{generic, RicParam};

use super::{Cell, Mode};

/// Evaluation backend for the mesh: plain floats or intervals.
pub(crate) trait Enclosure: Real + Send + Sync {
    /// Per-abscissa data reused by every power of the same `t`.
    type TData: Copy + Send + Sync;

    fn upper(self) -> f64;
    fn lower(self) -> f64;
    /// The RIC parameter as evaluated; intervals widen it one ulp upward so
    /// the decimal the user typed is enclosed.
    fn delta(d: f64) -> Self;
    fn pq_at(q: f64) -> Self;
    fn tdata(t: f64) -> Self::TData;
    /// `t^e` using cached per-`t` data; bit-identical to `pow_pos`.
    fn tpow(t: f64, data: Self::TData, e: Self) -> Self;
}

impl Enclosure for f64 {
    type TData = ();

    fn upper(self) -> f64 {
        self
    }
    fn lower(self) -> f64 {
        self
    }
    fn delta(d: f64) -> Self {
        d
    }
    fn pq_at(q: f64) -> Self {
        if q == 1.0 {
            0.25
        } else {
            generic::pq(q)
        }
    }
    fn tdata(_: f64) -> Self::TData {}
    #[inline]
    fn tpow(t: f64, _: (), e: f64) -> f64 {
        t.pow_pos(e)
    }
}

impl Enclosure for Interval {
    type TData = Option<Interval>;

    fn upper(self) -> f64 {
        self.hi()
    }
    fn lower(self) -> f64 {
        self.lo()
    }
    fn delta(d: f64) -> Self {
        Interval::new(d, d.next_up())
    }
    fn pq_at(q: f64) -> Self {
        generic::pq(Interval::point(q))
    }
    fn tdata(t: f64) -> Self::TData {
        (t > 0.0).then(|| Interval::point(t).ln())
    }
    #[inline]
    fn tpow(_t: f64, data: Option<Interval>, e: Interval) -> Interval {
        match data {
            Some(ln_t) => (e * ln_t).exp(),
            None => Interval::point(0.0),
        }
    }
}

/// Quantities depending only on the `q` side of a cell row.
#[derive(Clone, Copy)]
pub(crate) struct RowConsts<R> {
    p_lo: R,
    e1_lo: R,
    e21_hi: R,
    e2_hi: R,
}

impl<R: Enclosure> RowConsts<R> {
    pub(crate) fn new(q_lo: f64, q_hi: f64) -> Self {
        let (e1_lo, _, _) = generic::exponents(R::from_f64(q_lo));
        let (_, e21_hi, e2_hi) = generic::exponents(R::from_f64(q_hi));
        RowConsts { p_lo: R::pq_at(q_lo), e1_lo, e21_hi, e2_hi }
    }

    /// `r1(t_lo, q_lo) + r2(t_hi, q_hi) + r3(t_lo, q_hi)`.
    #[inline]
    pub(crate) fn corner_sum(
        &self,
        (t_lo, d_lo): (f64, R::TData),
        (t_hi, d_hi): (f64, R::TData),
        delta: R,
    ) -> R {
        let r1 = generic::r1_from_power(R::tpow(t_lo, d_lo, self.e1_lo), self.p_lo, delta);
        let r2 = R::tpow(t_hi, d_hi, self.e21_hi);
        let r3 = generic::r3_from_power(R::tpow(t_lo, d_lo, self.e2_hi), delta);
        r1 + r2 + r3
    }
}

pub(crate) fn corner_sum<R: Enclosure>(cell: &Cell, delta: R) -> R {
    RowConsts::<R>::new(cell.q_lo, cell.q_hi).corner_sum(
        (cell.t_lo, R::tdata(cell.t_lo)),
        (cell.t_hi, R::tdata(cell.t_hi)),
        delta,
    )
}

/// `r(t, q, delta)` at a point, in the chosen backend.
pub(crate) fn point_value<R: Enclosure>(t: f64, q: f64, delta: R) -> R {
    let (e1, e21, e2) = generic::exponents(R::from_f64(q));
    let td = R::tdata(t);
    let a = (R::pq_at(q) - R::from_f64(1.0)) * R::tpow(t, td, e1);
    let two = R::from_f64(2.0);
    two * delta + a * (two + a) * delta + R::tpow(t, td, e21) - (two - delta) * R::tpow(t, td, e2)
}

/// Largest `t` at which the corner bound is justified, `1/(2 - delta)`.
/// In interval mode this is the upper end of an enclosure, so a cell clipped
/// there covers the exact real threshold.
pub fn t_ceiling(delta: RicParam, mode: Mode) -> f64 {
    match mode {
        Mode::Float => delta.t_ceiling(),
        Mode::Interval => {
            let d = <Interval as Enclosure>::delta(delta.value());
            (Interval::point(1.0) / (Interval::point(2.0) - d)).hi()
        }
    }
}

pub(crate) fn check_hypothesis(cell: &Cell, delta: RicParam, mode: Mode) -> Result<()> {
    cell.validate()?;
    let ceiling = t_ceiling(delta, mode);
    if cell.t_hi > ceiling {
        return Err(Error::BoundInvalid(format!(
            "t_hi = {} exceeds 1/(2 - delta) = {ceiling}; r2 + r3 is not monotone in q there",
            cell.t_hi
        )));
    }
    Ok(())
}

/// Upper bound of `r(t, q, delta)` over `cell`. In interval mode the value is
/// the upper end of an outward-rounded enclosure of the corner sum.
pub fn cell_upper_bound(cell: &Cell, delta: RicParam, mode: Mode) -> Result<f64> {
    check_hypothesis(cell, delta, mode)?;
    Ok(match mode {
        Mode::Float => corner_sum::<f64>(cell, delta.value()),
        Mode::Interval => corner_sum::<Interval>(cell, Interval::delta(delta.value())).hi(),
    })
}

/// Interval enclosure of the corner sum.
pub fn cell_enclosure(cell: &Cell, delta: RicParam) -> Result<Interval> {
    check_hypothesis(cell, delta, Mode::Interval)?;
    Ok(corner_sum::<Interval>(cell, Interval::delta(delta.value())))
}
