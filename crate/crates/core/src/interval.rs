//! Closed real intervals with outward-padded arithmetic, and the tri-state
//! checks used to compare certified quantities against bounds.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Relative outward padding applied after each arithmetic operation.
const PAD: f64 = 4.0 * f64::EPSILON;

fn down(x: f64) -> f64 {
    if x.is_finite() {
        x - PAD * x.abs() - f64::MIN_POSITIVE
    } else {
        x
    }
}

fn up(x: f64) -> f64 {
    if x.is_finite() {
        x + PAD * x.abs() + f64::MIN_POSITIVE
    } else {
        x
    }
}

/// Serde helper that writes non-finite floats as strings so reports stay
/// valid JSON.
pub mod ext_f64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Str(s) => match s.as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

/// A closed interval `[lo, hi]` known to contain some real quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "ext_f64")]
    pub lo: f64,
    #[serde(with = "ext_f64")]
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(!(lo > hi), "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Self::point(0.0)
    }

    pub fn one() -> Self {
        Self::point(1.0)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            0.5 * (self.lo + self.hi)
        } else if self.lo.is_finite() {
            self.lo
        } else {
            self.hi
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn max(self, o: Interval) -> Interval {
        Interval::new(self.lo.max(o.lo), self.hi.max(o.hi))
    }

    pub fn min(self, o: Interval) -> Interval {
        Interval::new(self.lo.min(o.lo), self.hi.min(o.hi))
    }

    /// Clamp both ends into `[a, b]`; used when a quantity is known a priori
    /// to lie in that range.
    pub fn clamp(self, a: f64, b: f64) -> Interval {
        Interval::new(self.lo.clamp(a, b), self.hi.clamp(a, b))
    }

    pub fn recip(self) -> Interval {
        Interval::one() / self
    }

    pub fn sqrt(self) -> Interval {
        Interval::new(down(self.lo.max(0.0).sqrt()).max(0.0), up(self.hi.max(0.0).sqrt()))
    }

    /// Integer power for intervals with `lo >= 0`.
    pub fn powi(self, k: i32) -> Interval {
        debug_assert!(self.lo >= 0.0);
        if k >= 0 {
            Interval::new(down(self.lo.powi(k)).max(0.0), up(self.hi.powi(k)))
        } else {
            Interval::one() / self.powi(-k)
        }
    }

    /// Real power for intervals with `lo >= 0` and exponent `e >= 0`.
    pub fn powf(self, e: f64) -> Interval {
        debug_assert!(self.lo >= 0.0 && e >= 0.0);
        Interval::new(down(self.lo.powf(e)).max(0.0), up(self.hi.powf(e)))
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6e}, {:.6e}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

/// Adding an exact zero is exact, and so is a floating-point sum that
/// comes out as zero, so those ends need no padding.
fn sum_lo(a: f64, b: f64) -> f64 {
    let s = a + b;
    if a == 0.0 || b == 0.0 || s == 0.0 {
        s
    } else {
        down(s)
    }
}

fn sum_hi(a: f64, b: f64) -> f64 {
    let s = a + b;
    if a == 0.0 || b == 0.0 || s == 0.0 {
        s
    } else {
        up(s)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::new(sum_lo(self.lo, o.lo), sum_hi(self.hi, o.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::new(sum_lo(self.lo, -o.hi), sum_hi(self.hi, -o.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

/// Product of interval ends with a flag telling whether it is exact.
/// A zero factor gives an exact 0 (also against an infinite end), and a
/// factor of ±1 is exact.
fn mul_ends(a: f64, b: f64) -> (f64, bool) {
    if a == 0.0 || b == 0.0 {
        (0.0, true)
    } else {
        (a * b, a.abs() == 1.0 || b.abs() == 1.0)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let c = [
            mul_ends(self.lo, o.lo),
            mul_ends(self.lo, o.hi),
            mul_ends(self.hi, o.lo),
            mul_ends(self.hi, o.hi),
        ];
        let lo = c.iter().map(|&(x, exact)| if exact { x } else { down(x) }).fold(f64::INFINITY, f64::min);
        let hi = c.iter().map(|&(x, exact)| if exact { x } else { up(x) }).fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }
}

/// `1/x` is exact when `x` is a power of two.
fn exact_recip(x: f64) -> bool {
    x.is_normal() && x.to_bits() & ((1u64 << 52) - 1) == 0
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            // Denominator may vanish: nothing better than the whole line,
            // except for the common non-negative case.
            if self.lo >= 0.0 && o.lo >= 0.0 {
                let lo = if o.hi > 0.0 { self.lo / o.hi } else { f64::INFINITY };
                let lo = if lo.is_nan() { 0.0 } else { lo };
                return Interval::new(down(lo).max(0.0), f64::INFINITY);
            }
            return Interval::new(f64::NEG_INFINITY, f64::INFINITY);
        }
        let rlo = 1.0 / o.hi;
        let rhi = 1.0 / o.lo;
        let r = Interval::new(if exact_recip(o.hi) { rlo } else { down(rlo) }, if exact_recip(o.lo) { rhi } else { up(rhi) });
        self * r
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, o: f64) -> Interval {
        self * Interval::point(o)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, o: f64) -> Interval {
        self + Interval::point(o)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, o: f64) -> Interval {
        self - Interval::point(o)
    }
}

impl Div<f64> for Interval {
    type Output = Interval;
    fn div(self, o: f64) -> Interval {
        self / Interval::point(o)
    }
}

impl Add<Interval> for f64 {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::point(self) + o
    }
}

impl Sub<Interval> for f64 {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::point(self) - o
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        Interval::point(self) * o
    }
}

impl Div<Interval> for f64 {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        Interval::point(self) / o
    }
}

/// Outcome of comparing two certified quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Holds,
    Violated,
    Indeterminate,
}

impl Check {
    /// `lhs <= rhs` for every value in the enclosures.
    pub fn le(lhs: Interval, rhs: Interval) -> Check {
        if lhs.hi <= rhs.lo {
            Check::Holds
        } else if lhs.lo > rhs.hi {
            Check::Violated
        } else {
            Check::Indeterminate
        }
    }

    /// Strict `lhs < rhs`.
    pub fn lt(lhs: Interval, rhs: Interval) -> Check {
        if lhs.hi < rhs.lo {
            Check::Holds
        } else if lhs.lo >= rhs.hi {
            Check::Violated
        } else {
            Check::Indeterminate
        }
    }

    pub fn ge(lhs: Interval, rhs: Interval) -> Check {
        Check::le(rhs, lhs)
    }

    pub fn gt(lhs: Interval, rhs: Interval) -> Check {
        Check::lt(rhs, lhs)
    }

    pub fn from_bool(b: bool) -> Check {
        if b {
            Check::Holds
        } else {
            Check::Violated
        }
    }

    pub fn holds(self) -> bool {
        self == Check::Holds
    }

    pub fn violated(self) -> bool {
        self == Check::Violated
    }

    /// Conjunction in three-valued logic.
    pub fn and(self, o: Check) -> Check {
        match (self, o) {
            (Check::Violated, _) | (_, Check::Violated) => Check::Violated,
            (Check::Holds, Check::Holds) => Check::Holds,
            _ => Check::Indeterminate,
        }
    }
}

/// A named inequality evaluated on certified enclosures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub lhs: Interval,
    pub relation: String,
    pub rhs: Interval,
    pub status: Check,
}

impl NamedCheck {
    pub fn new(name: impl Into<String>, lhs: Interval, relation: &str, rhs: Interval) -> Self {
        let status = match relation {
            "<" => Check::lt(lhs, rhs),
            "<=" => Check::le(lhs, rhs),
            ">" => Check::gt(lhs, rhs),
            ">=" => Check::ge(lhs, rhs),
            _ => panic!("unknown relation {relation}"),
        };
        NamedCheck { name: name.into(), lhs, relation: relation.to_string(), rhs, status }
    }

    /// An integer (exact) comparison recorded in the same format.
    pub fn exact(name: impl Into<String>, lhs: f64, relation: &str, rhs: f64) -> Self {
        let ok = match relation {
            "<" => lhs < rhs,
            "<=" => lhs <= rhs,
            ">" => lhs > rhs,
            ">=" => lhs >= rhs,
            "==" => lhs == rhs,
            _ => panic!("unknown relation {relation}"),
        };
        NamedCheck {
            name: name.into(),
            lhs: Interval::point(lhs),
            relation: relation.to_string(),
            rhs: Interval::point(rhs),
            status: Check::from_bool(ok),
        }
    }
}

/// Fold a list of checks into one status.
pub fn all_hold(checks: &[NamedCheck]) -> Check {
    checks.iter().fold(Check::Holds, |acc, c| acc.and(c.status))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_encloses_exact_values() {
        let a = Interval::new(1.0, 2.0);
        let b = Interval::new(3.0, 5.0);
        let s = a + b;
        assert!(s.contains(4.0) && s.contains(7.0));
        let d = a - b;
        assert!(d.contains(-4.0) && d.contains(-1.0));
        let p = a * b;
        assert!(p.contains(3.0) && p.contains(10.0));
        let q = a / b;
        assert!(q.contains(0.2) && q.contains(2.0 / 3.0));
    }

    #[test]
    fn division_by_zero_straddle_is_unbounded() {
        let q = Interval::one() / Interval::new(0.0, 1.0);
        assert_eq!(q.hi, f64::INFINITY);
        assert!(q.lo <= 1.0);
    }

    #[test]
    fn checks_are_three_valued() {
        let a = Interval::new(0.1, 0.2);
        assert_eq!(Check::lt(a, Interval::point(0.3)), Check::Holds);
        assert_eq!(Check::lt(a, Interval::point(0.05)), Check::Violated);
        assert_eq!(Check::lt(a, Interval::point(0.15)), Check::Indeterminate);
        assert_eq!(Check::Holds.and(Check::Indeterminate), Check::Indeterminate);
    }

    #[test]
    fn infinite_endpoints_round_trip_through_json() {
        let i = Interval::new(0.5, f64::INFINITY);
        let s = serde_json::to_string(&i).unwrap();
        assert!(s.contains("\"inf\""));
        let back: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, i);
    }
}
