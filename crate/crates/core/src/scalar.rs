//! Closed-form scalar functions.
//!
//! Notation follows the usual compressed-sensing conventions: `q` is the
//! quasi-norm exponent, `delta` a restricted isometry constant, and `t` the
//! share of the tail mass `sum_{i>=1} ||h_{T_i}||_q^q` carried by the first
//! tail block. The sufficient condition for recovery is
//! `r(t, q, delta) < 1` for every `t` in `(0, 1]`.
//!
//! The formulas live in [`generic`] and are shared by the float API below and
//! by the interval evaluation in [`crate::certify`].

use crate::error::{Error, Result};

/// Largest `q` for which the logarithmic upper estimate of `p_q` holds.
pub const PQ_UPPER_BOUND_MAX_Q: f64 = 0.4797;

/// Range on which the mesh bound for the derivative of `B` is justified.
pub const B_DERIVATIVE_RANGE: (f64, f64) = (0.3, 0.99);

/// Quasi-norm exponent, `0 < q <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QExponent(f64);

impl QExponent {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q <= 1.0 {
            Ok(QExponent(q))
        } else {
            Err(Error::domain(format!("q = {q} is outside (0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Rejects `q = 1` for operations that need `q < 1` strictly.
    pub fn strictly_below_one(self) -> Result<f64> {
        if self.0 < 1.0 {
            Ok(self.0)
        } else {
            Err(Error::domain("this operation requires q < 1"))
        }
    }
}

/// Restricted isometry constant, `0 < delta < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RicParam(f64);

impl RicParam {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta < 1.0 {
            Ok(RicParam(delta))
        } else {
            Err(Error::domain(format!("delta = {delta} is outside (0, 1)")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1/(2 - delta)`, the largest `t` at which `r2 + r3` is still
    /// nondecreasing in `q`.
    pub fn t_ceiling(self) -> f64 {
        1.0 / (2.0 - self.0)
    }
}

/// Tail ratio `t` in `[0, 1]`; `t = 0` is admitted as a limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RatioT(f64);

impl RatioT {
    pub fn new(t: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&t) {
            Ok(RatioT(t))
        } else {
            Err(Error::domain(format!("t = {t} is outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Formula bodies generic over [`Real`](crate::real::Real).
pub mod generic {
    use crate::real::Real;

    #[inline]
    fn c<R: Real>(x: f64) -> R {
        R::from_f64(x)
    }

    /// `p_q = (q/2)^{q/(2-q)} - (q/2)^{2/(2-q)}`, evaluated as two
    /// exponentials of multiples of `ln(q/2)`.
    #[inline]
    pub fn pq<R: Real>(q: R) -> R {
        let l = (q * c(0.5)).ln();
        let d = c::<R>(2.0) - q;
        ((q / d) * l).exp() - ((c::<R>(2.0) / d) * l).exp()
    }

    /// `r1 = delta + delta (1 - (1 - p_q) u)^2` with `u = t^{1/q}`.
    #[inline]
    pub fn r1_from_power<R: Real>(u: R, p: R, delta: R) -> R {
        delta + delta * (c::<R>(1.0) - (c::<R>(1.0) - p) * u).sqr()
    }

    /// `r3 = -(2 - delta) w` with `w = t^{2/q}`.
    #[inline]
    pub fn r3_from_power<R: Real>(w: R, delta: R) -> R {
        -((c::<R>(2.0) - delta) * w)
    }

    /// Exponents `(1/q, (2-q)/q, 2/q)` used by `r1`, `r2`, `r3`.
    #[inline]
    pub fn exponents<R: Real>(q: R) -> (R, R, R) {
        (c::<R>(1.0) / q, (c::<R>(2.0) - q) / q, c::<R>(2.0) / q)
    }

    pub fn r1<R: Real>(t: R, q: R, delta: R) -> R {
        let (e1, _, _) = exponents(q);
        r1_from_power(t.pow_pos(e1), pq(q), delta)
    }

    pub fn r2<R: Real>(t: R, q: R) -> R {
        let (_, e21, _) = exponents(q);
        t.pow_pos(e21)
    }

    pub fn r3<R: Real>(t: R, q: R, delta: R) -> R {
        let (_, _, e2) = exponents(q);
        r3_from_power(t.pow_pos(e2), delta)
    }

    /// `r(t,q,delta) = 2 delta + a (2 + a) delta + t^{(2-q)/q} - (2 - delta) t^{2/q}`
    /// with `a = (p_q - 1) t^{1/q}`.
    pub fn r<R: Real>(t: R, q: R, delta: R) -> R {
        let (e1, e21, e2) = exponents(q);
        let a = (pq(q) - c(1.0)) * t.pow_pos(e1);
        c::<R>(2.0) * delta + a * (c::<R>(2.0) + a) * delta + t.pow_pos(e21)
            - (c::<R>(2.0) - delta) * t.pow_pos(e2)
    }

    /// `B(q) = ((1 - p_q)/(2 - q))^{q/(1-q)}`.
    pub fn boundary_b<R: Real>(q: R) -> R {
        let one = c::<R>(1.0);
        let base = (one - pq(q)) / (c::<R>(2.0) - q);
        ((q / (one - q)) * base.ln()).exp()
    }

    /// Corner upper bound, over `[q_lo, q_hi]`, of the factor deciding the
    /// sign of `dB/dq`:
    ///
    /// `ln((1-p_{q_hi})/(2-q_hi))/(1-q_lo)^2 + q_hi/((1-q_hi)(2-q_hi))
    ///  - 2 q_hi ln(q_lo/2) p_{q_lo} / ((1-q_hi)(1-p_{q_lo})(2-q_hi)^2)`.
    pub fn boundary_b_derivative_bound<R: Real>(q_lo: R, q_hi: R) -> R {
        let one = c::<R>(1.0);
        let two = c::<R>(2.0);
        let p_lo = pq(q_lo);
        let p_hi = pq(q_hi);
        let term1 = ((one - p_hi) / (two - q_hi)).ln() / (one - q_lo).sqr();
        let term2 = q_hi / ((one - q_hi) * (two - q_hi));
        let term3 = -(two * q_hi * (q_lo * c(0.5)).ln() * p_lo)
            / ((one - q_hi) * (one - p_lo) * (two - q_hi).sqr());
        term1 + term2 + term3
    }

    /// Corner upper bound on `[q_lo, q_hi]` inside `(0, 0.3]` of
    /// `ln((1-p)/(2-q))/(1-q) + q/(2-q) + 2 p/(2-q)`. Passing `q_lo = 0`
    /// uses the limit `p_0 = 1`.
    pub fn small_q_brace_bound<R: Real>(q_lo: R, q_hi: R, q_lo_is_zero: bool) -> R {
        let one = c::<R>(1.0);
        let two = c::<R>(2.0);
        let p_lo = if q_lo_is_zero { one } else { pq(q_lo) };
        let p_hi = pq(q_hi);
        ((one - p_hi) / (two - q_hi)).ln() / (one - q_lo) + q_hi / (two - q_hi)
            + two * p_lo / (two - q_hi)
    }
}

/// `p_q`, the constant of the quasi-norm converse Cauchy-Schwarz
/// inequality. Exactly `1/4` at `q = 1`.
pub fn pq(q: QExponent) -> f64 {
    if q.0 == 1.0 {
        0.25
    } else {
        generic::pq(q.0)
    }
}

/// `dp_q/dq = 2 ln(q/2) p_q / (2-q)^2`.
pub fn pq_derivative(q: QExponent) -> Result<f64> {
    let q = q.strictly_below_one()?;
    Ok(2.0 * (q / 2.0).ln() * generic::pq(q) / (2.0 - q).powi(2))
}

/// `d^2 p_q/dq^2 = [(2 ln(q/2) + 2 - q)^2 + (2-q)^3/q] p_q / (2-q)^4`.
pub fn pq_second_derivative(q: QExponent) -> Result<f64> {
    let q = q.strictly_below_one()?;
    let d = 2.0 - q;
    let bracket = (2.0 * (q / 2.0).ln() + d).powi(2) + d.powi(3) / q;
    Ok(bracket * generic::pq(q) / d.powi(4))
}

/// `1 + q ln(q/2)/(2-q)`, an upper estimate of `p_q` for `q <= 0.4797`.
pub fn pq_upper_bound(q: QExponent) -> Result<f64> {
    if q.0 > PQ_UPPER_BOUND_MAX_Q {
        return Err(Error::Hypothesis(format!(
            "the p_q upper estimate needs q <= {PQ_UPPER_BOUND_MAX_Q}, got {}",
            q.0
        )));
    }
    Ok(1.0 + q.0 * (q.0 / 2.0).ln() / (2.0 - q.0))
}

/// The three monotone pieces of `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RComponents {
    /// Nonincreasing in `t` and in `q`.
    pub r1: f64,
    /// Nondecreasing in `t`.
    pub r2: f64,
    /// Nonincreasing in `t`.
    pub r3: f64,
}

impl RComponents {
    pub fn sum(&self) -> f64 {
        self.r1 + self.r2 + self.r3
    }
}

pub fn r_components(t: RatioT, q: QExponent, delta: RicParam) -> RComponents {
    let (t, d) = (t.0, delta.0);
    if t == 0.0 {
        return RComponents { r1: 2.0 * d, r2: 0.0, r3: 0.0 };
    }
    let (e1, e21, e2) = generic::exponents(q.0);
    RComponents {
        r1: generic::r1_from_power(t.powf(e1), pq(q), d),
        r2: t.powf(e21),
        r3: generic::r3_from_power(t.powf(e2), d),
    }
}

/// The sufficient-condition function `r(t, q, delta)`; `r < 1` for all
/// `t` in `(0, 1]` guarantees that every lq minimizer is the sparse solution.
pub fn r(t: RatioT, q: QExponent, delta: RicParam) -> f64 {
    let (t, q, d) = (t.0, q.0, delta.0);
    if t == 0.0 {
        return 2.0 * d;
    }
    let p = if q == 1.0 { 0.25 } else { generic::pq(q) };
    let a = (p - 1.0) * t.powf(1.0 / q);
    2.0 * d + a * (2.0 + a) * d + t.powf((2.0 - q) / q) - (2.0 - d) * t.powf(2.0 / q)
}

/// `r(t, 1, delta) = 2 delta + (1 - 3 delta/2) t - (2 - 25 delta/16) t^2`.
pub fn r_q1(t: RatioT, delta: RicParam) -> f64 {
    let (t, d) = (t.0, delta.0);
    2.0 * d + (1.0 - 1.5 * d) * t - (2.0 - 25.0 * d / 16.0) * t * t
}

/// Maximum of `r(t, 1, delta)` over `t in [0, 1]` and a maximizer.
pub fn r_q1_max(delta: RicParam) -> (f64, f64) {
    let d = delta.0;
    let t = ((1.0 - 1.5 * d) / (2.0 * (2.0 - 25.0 * d / 16.0))).clamp(0.0, 1.0);
    (t, r_q1(RatioT(t), delta))
}

/// Discriminant of `r(t, 1, delta) = 1`; negative exactly when the parabola
/// stays below one.
pub fn q1_discriminant(delta: f64) -> f64 {
    (1.0 - 1.5 * delta).powi(2) + 4.0 * (2.0 - 25.0 * delta / 16.0) * (2.0 * delta - 1.0)
}

/// `(77 - sqrt(1337))/82`, the root of the `q = 1` discriminant.
pub fn q1_threshold() -> f64 {
    (77.0 - 1337f64.sqrt()) / 82.0
}

/// `B(q) = ((1-p_q)/(2-q))^{q/(1-q)}`; `r(t, q, 1/2) < 1` for `0 < t < B(q)`.
pub fn boundary_b(q: QExponent) -> Result<f64> {
    let q = q.strictly_below_one()?;
    Ok(generic::boundary_b(q))
}

/// The exact bracketed factor of `dB/dq` (its sign is the sign of `dB/dq`).
pub fn boundary_b_derivative_factor(q: QExponent) -> Result<f64> {
    let q = q.strictly_below_one()?;
    let p = generic::pq(q);
    let term1 = ((1.0 - p) / (2.0 - q)).ln() / (1.0 - q).powi(2);
    let term2 = q * (1.0 - p - 2.0 * (q / 2.0).ln() / (2.0 - q) * p)
        / ((1.0 - q) * (1.0 - p) * (2.0 - q));
    Ok(term1 + term2)
}

/// Upper bound of the `dB/dq` sign factor over `[q_lo, q_hi]`; a negative
/// value certifies `B` strictly decreasing there.
pub fn boundary_b_derivative_bound(q_lo: QExponent, q_hi: QExponent) -> Result<f64> {
    let (lo, hi) = (q_lo.0, q_hi.0);
    let (min, max) = B_DERIVATIVE_RANGE;
    if !(lo < hi) {
        return Err(Error::domain(format!("empty q interval [{lo}, {hi}]")));
    }
    if lo < min || hi > max {
        return Err(Error::domain(format!(
            "derivative bound is only justified on [{min}, {max}], got [{lo}, {hi}]"
        )));
    }
    Ok(generic::boundary_b_derivative_bound(lo, hi))
}

fn check_finite(x: &[f64]) -> Result<()> {
    if x.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("vector contains NaN"));
    }
    if x.iter().any(|v| v.is_infinite()) {
        return Err(Error::domain("vector contains an infinite entry"));
    }
    Ok(())
}

/// `sum |x_i|^q`. The empty vector has value 0.
pub fn quasi_norm_pow(x: &[f64], q: QExponent) -> Result<f64> {
    check_finite(x)?;
    let q = q.0;
    Ok(if q == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else {
        x.iter().filter(|v| **v != 0.0).map(|v| v.abs().powf(q)).sum()
    })
}

/// `||x||_q = (sum |x_i|^q)^{1/q}`. The empty vector has norm 0.
pub fn quasi_norm(x: &[f64], q: QExponent) -> Result<f64> {
    let s = quasi_norm_pow(x, q)?;
    Ok(if q.0 == 1.0 { s } else { s.powf(1.0 / q.0) })
}

/// Both sides of an inequality `lhs <= rhs` evaluated on concrete data.
/// `holds` allows a relative slack of `1e-12 * max(1, rhs)` for rounding.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct InequalityCheck {
    #[serde(serialize_with = "crate::format::serialize_f64")]
    pub lhs: f64,
    #[serde(serialize_with = "crate::format::serialize_f64")]
    pub rhs: f64,
    pub holds: bool,
}

const INEQUALITY_REL_TOL: f64 = 1e-12;

impl InequalityCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let holds = lhs <= rhs + INEQUALITY_REL_TOL * rhs.abs().max(1.0);
        InequalityCheck { lhs, rhs, holds }
    }
}

fn converse_cauchy_schwarz(x: &[f64], q: QExponent) -> Result<InequalityCheck> {
    check_finite(x)?;
    if x.is_empty() {
        return Err(Error::domain("the inequality needs n >= 1"));
    }
    let n = x.len() as f64;
    let lhs = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (mut max, mut min) = (0.0f64, f64::INFINITY);
    for v in x {
        max = max.max(v.abs());
        min = min.min(v.abs());
    }
    let qv = q.0;
    let rhs = quasi_norm(x, q)? / n.powf(1.0 / qv - 0.5) + pq(q) * n.sqrt() * (max - min);
    Ok(InequalityCheck::new(lhs, rhs))
}

/// The quasi-norm converse Cauchy-Schwarz inequality
/// `||x||_2 <= ||x||_q / n^{1/q-1/2} + p_q sqrt(n) (max|x_i| - min|x_i|)`
/// for `0 < q < 1`.
pub fn lemma3_check(x: &[f64], q: QExponent) -> Result<InequalityCheck> {
    q.strictly_below_one()?;
    converse_cauchy_schwarz(x, q)
}

/// The `l1` version of the inequality, with constant `1/4 = p_1`.
pub fn lemma2_check(x: &[f64]) -> Result<InequalityCheck> {
    converse_cauchy_schwarz(x, QExponent(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MaxGap {
    #[serde(serialize_with = "crate::format::serialize_f64")]
    pub r_star: f64,
    #[serde(serialize_with = "crate::format::serialize_f64")]
    pub value: f64,
}

/// Maximizes `sqrt(r) - r^{1/q} / n^{1/q-1/2}` over real `r` in `[1, n]`.
///
/// The objective is concave; the unconstrained maximizer is
/// `n (q/2)^{2q/(2-q)}` with value `p_q sqrt(n)`. It is clamped to `[1, n]`.
pub fn max_gap(n: usize, q: QExponent) -> Result<MaxGap> {
    let q = q.strictly_below_one()?;
    if n == 0 {
        return Err(Error::domain("max_gap needs n >= 1"));
    }
    let nf = n as f64;
    let scale = nf.powf(1.0 / q - 0.5);
    let objective = |r: f64| r.sqrt() - r.powf(1.0 / q) / scale;
    let stationary = nf * (q / 2.0).powf(2.0 * q / (2.0 - q));
    let r_star = stationary.clamp(1.0, nf);
    Ok(MaxGap { r_star, value: objective(r_star) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q(v: f64) -> QExponent {
        QExponent::new(v).unwrap()
    }
    fn t(v: f64) -> RatioT {
        RatioT::new(v).unwrap()
    }
    fn d(v: f64) -> RicParam {
        RicParam::new(v).unwrap()
    }

    // Reference values below were computed with mpmath at 40 digits.

    #[test]
    fn pq_anchor_values() {
        assert_eq!(pq(q(1.0)), 0.25);
        assert!((pq(q(0.3)) - 0.608_167_580_492_642_2).abs() < 1e-12);
        assert!((pq(q(0.5)) - 0.472_470_393_710_577_4).abs() < 1e-12);
        assert!((pq(q(1e-4)) - 0.999_454_948_207_100_1).abs() < 1e-12);
        assert!(pq(q(0.3)) > 0.6081);
    }

    #[test]
    fn q_validation() {
        assert!(QExponent::new(0.0).is_err());
        assert!(QExponent::new(1.0000001).is_err());
        assert!(QExponent::new(f64::NAN).is_err());
        assert!(RicParam::new(1.0).is_err());
        assert!(RatioT::new(-0.1).is_err());
        assert!(matches!(pq_derivative(q(1.0)), Err(Error::Domain(_))));
        assert!(matches!(boundary_b(q(1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn pq_derivatives_anchor() {
        assert!((pq_derivative(q(0.3)).unwrap() + 0.798_454_582_084_625_8).abs() < 1e-12);
        assert!((pq_second_derivative(q(0.3)).unwrap() - 1.511_845_414_160_132_4).abs() < 1e-11);
        assert!((pq_second_derivative(q(0.5)).unwrap() - 0.781_102_712_521_214_2).abs() < 1e-11);
        for &v in &[0.1, 0.5, 0.9] {
            assert!(pq_derivative(q(v)).unwrap() < 0.0);
            assert!(pq_second_derivative(q(v)).unwrap() > 0.0);
        }
    }

    #[test]
    fn second_derivative_two_paths() {
        // bracket evaluated term by term, independently of the closed form
        let qq = 0.3f64;
        let l = (qq / 2.0).ln();
        let a = 2.0 * l + 2.0 - qq;
        let bracket = a * a + (2.0 - qq) * (2.0 - qq) * (2.0 - qq) / qq;
        let p = (qq / 2.0).powf(qq / (2.0 - qq)) - (qq / 2.0).powf(2.0 / (2.0 - qq));
        let expected = bracket * p / 1.7f64.powi(4);
        assert_relative_eq!(pq_second_derivative(q(0.3)).unwrap(), expected, max_relative = 1e-13);
    }

    #[test]
    fn finite_differences() {
        let h = 1e-6;
        let fd = (pq(q(0.5 + h)) - pq(q(0.5 - h))) / (2.0 * h);
        assert_relative_eq!(pq_derivative(q(0.5)).unwrap(), fd, max_relative = 1e-6);
        let h = 1e-4;
        let fd2 = (pq(q(0.5 + h)) - 2.0 * pq(q(0.5)) + pq(q(0.5 - h))) / (h * h);
        assert_relative_eq!(pq_second_derivative(q(0.5)).unwrap(), fd2, max_relative = 1e-3);
    }

    #[test]
    fn upper_estimate() {
        let ub = pq_upper_bound(q(0.3)).unwrap();
        assert!((ub - 0.665_214_120_314_256_2).abs() < 1e-12);
        assert!(pq(q(0.3)) < ub);
        let ub = pq_upper_bound(q(0.1)).unwrap();
        assert!((ub - 0.842_329_880_339_263_6).abs() < 1e-12);
        assert!(pq(q(0.1)) < ub);
        assert!(pq(q(0.4797)) < pq_upper_bound(q(0.4797)).unwrap());
        assert!(matches!(pq_upper_bound(q(0.48)), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn components_and_sum() {
        let c = r_components(t(0.0), q(0.5), d(0.5));
        assert_eq!((c.r1, c.r2, c.r3), (1.0, 0.0, 0.0));

        let c = r_components(t(1.0), q(1.0), d(0.4931));
        assert!((c.r1 - 0.523_918_75).abs() < 1e-14);
        assert_eq!(c.r2, 1.0);
        assert!((c.r3 + 1.5069).abs() < 1e-14);
        assert!((c.sum() - 0.017_018_75).abs() < 1e-13);

        let c = r_components(t(0.5), q(0.5), d(0.5));
        assert!((c.sum() - 0.908_064_082_349_890_4).abs() < 1e-12);
        assert!((c.sum() - r(t(0.5), q(0.5), d(0.5))).abs() < 1e-13);
    }

    #[test]
    fn r_anchors() {
        let v = r(t(0.064), q(0.9182), d(0.5));
        assert!(v > 1.000_000_2);
        assert!((v - 1.000_000_258_238_765_2).abs() < 1e-12);
        assert_eq!(r(t(0.0), q(0.3), d(0.4)), 0.8);
        assert!((r(t(1e-12), q(0.7), d(0.3)) - 0.6).abs() < 1e-10);
        for &dv in &[0.2, 0.4931, 0.5] {
            assert!((r(t(1.0), q(1.0), d(dv)) - (2.0625 * dv - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn q1_specialization() {
        for &tv in &[0.1, 0.5, 0.9] {
            for &dv in &[0.3, 0.4931] {
                assert!((r_q1(t(tv), d(dv)) - r(t(tv), q(1.0), d(dv))).abs() < 1e-12);
            }
        }
        assert_eq!(r_q1(t(0.0), d(0.3)), 0.6);
        assert!((r_q1(t(1.0), d(0.4931)) - 0.017_018_75).abs() < 1e-14);
    }

    #[test]
    fn q1_threshold_root() {
        let th = q1_threshold();
        assert!((th - 0.493_109_626_858_970_2).abs() < 1e-15);
        assert!(q1_discriminant(th).abs() < 1e-9);
        assert!(q1_discriminant(0.49) < 0.0);
        assert!(q1_discriminant(0.4932) >= 0.0);
        // 41 d^2 - 77 d + 28 > 0 is the same condition
        assert!(41.0 * 0.49f64.powi(2) - 77.0 * 0.49 + 28.0 > 0.0);
    }

    #[test]
    fn q1_parabola_maximum() {
        let (tm, vm) = r_q1_max(d(0.4935));
        assert!(vm >= 1.0 && tm > 0.0 && tm < 1.0);
        assert!(r_q1_max(d(0.4931)).1 < 1.0);
        for i in 0..=1000 {
            let s = i as f64 / 1000.0;
            assert!(r_q1(t(s), d(0.4935)) <= vm);
        }
    }

    #[test]
    fn boundary_values() {
        assert!((boundary_b(q(0.17)).unwrap() - 0.676_897_885_017_628_6).abs() < 1e-12);
        assert!((boundary_b(q(0.9181)).unwrap() - 0.010_509_380_017_794_23).abs() < 1e-12);
        assert!((boundary_b(q(0.5)).unwrap() - 0.351_686_404_192_948_4).abs() < 1e-12);
        assert!(boundary_b(q(1e-6)).unwrap() > 0.9999);
        assert!(boundary_b(q(0.999)).unwrap() < 1e-3);
        let b = |v| boundary_b(q(v)).unwrap();
        assert!(b(0.2) > b(0.5) && b(0.5) > b(0.9));
    }

    #[test]
    fn derivative_bound_mesh_ends() {
        assert!(boundary_b_derivative_bound(q(0.3), q(0.31)).unwrap() < 0.0);
        assert!(boundary_b_derivative_bound(q(0.98), q(0.99)).unwrap() < 0.0);
        assert!(boundary_b_derivative_bound(q(0.29), q(0.31)).is_err());
        assert!(boundary_b_derivative_bound(q(0.98), q(0.995)).is_err());
        for &v in &[0.3, 0.5, 0.98] {
            let exact = boundary_b_derivative_factor(q(v)).unwrap();
            let collapsed = boundary_b_derivative_bound(q(v), q(v + 1e-8)).unwrap();
            assert_relative_eq!(collapsed, exact, max_relative = 1e-5);
        }
        assert!((boundary_b_derivative_factor(q(0.3)).unwrap() + 1.869_578_379_453_379).abs() < 1e-10);
    }

    #[test]
    fn quasi_norm_cases() {
        assert!((quasi_norm(&[1.0, 1.0], q(0.5)).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(quasi_norm(&[3.0, 4.0], q(1.0)).unwrap(), 7.0);
        assert_eq!(quasi_norm(&[], q(0.5)).unwrap(), 0.0);
        assert!(matches!(quasi_norm(&[1.0, f64::NAN], q(0.5)), Err(Error::Domain(_))));
    }

    #[test]
    fn lemma3_examples() {
        let c = lemma3_check(&[1.0; 4], q(0.5)).unwrap();
        assert!((c.lhs - 2.0).abs() < 1e-12 && (c.rhs - 2.0).abs() < 1e-12 && c.holds);
        let c = lemma3_check(&[1.0, 0.0, 0.0, 0.0], q(0.5)).unwrap();
        assert_eq!(c.lhs, 1.0);
        assert!((c.rhs - 1.069_940_787_421_154_9).abs() < 1e-12);
        assert!(c.holds);
        assert!(lemma3_check(&[1.0], q(1.0)).is_err());
        assert!(lemma3_check(&[f64::NAN], q(0.5)).is_err());
    }

    #[test]
    fn max_gap_examples() {
        let g = max_gap(4, q(0.5)).unwrap();
        assert!((g.r_star - 1.587_401_051_968_199_5).abs() < 1e-12);
        assert!((g.value - 0.944_940_787_421_154_9).abs() < 1e-12);
        let g = max_gap(1, q(0.5)).unwrap();
        assert_eq!(g.r_star, 1.0);
        assert_eq!(g.value, 0.0);
        assert!(max_gap(0, q(0.5)).is_err());
    }
}
