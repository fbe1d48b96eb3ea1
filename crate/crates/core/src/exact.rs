//! Exact nonnegative-and-signed scalars with a separated power of three.
//!
//! Scales in this crate are often of the form `c * 3^-e` with `e` in the
//! hundreds of thousands (the lacunary normalizing sequence), far outside
//! the range of `f64`. [`Exact`] keeps such values as a small rational
//! mantissa times `3^exp`, so products and quotients never touch the huge
//! power, and converts to `f64` only when asked.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent gap above which comparisons first try a logarithmic estimate.
const LOG_COMPARE_GAP: i64 = 64;

/// An exact rational number stored as `mantissa * 3^exp3`.
///
/// The mantissa is kept free of factors of three in both numerator and
/// denominator, which makes the representation canonical: two values are
/// equal iff their fields are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exact {
    mant: BigRational,
    exp3: i64,
}

fn big3() -> BigInt {
    BigInt::from(3u8)
}

fn pow3_int(e: u64) -> BigInt {
    num_traits::pow::pow(big3(), e as usize)
}

/// `p / q` as `f * 2^shift` with `f` a finite `f64`, however large `p` and `q` are.
fn rational_parts(r: &BigRational) -> (f64, i64) {
    fn top(n: &BigInt) -> (f64, i64) {
        let shift = (n.bits() as i64 - 64).max(0);
        ((n >> shift as usize).to_f64().unwrap_or(f64::NAN), shift)
    }
    let (n, sn) = top(r.numer());
    let (d, sd) = top(r.denom());
    (n / d, sn - sd)
}

/// `f * 2^b * 3^e`, applying whichever factor pulls the running value toward one.
fn assemble(mut value: f64, mut b: i64, mut e: i64) -> f64 {
    while (b != 0 || e != 0) && value != 0.0 && value.is_finite() {
        let shrink = value.abs() >= 1.0;
        if (shrink && b < 0) || (!shrink && b > 0) || e == 0 {
            let step = b.clamp(-1000, 1000);
            value *= 2f64.powi(step as i32);
            b -= step;
        } else {
            let step = e.clamp(-600, 600);
            value *= 3f64.powi(step as i32);
            e -= step;
        }
    }
    value
}

/// Removes every factor of three from `n`, returning the reduced value and
/// the number of factors removed.
fn strip3(mut n: BigInt) -> (BigInt, i64) {
    if n.is_zero() {
        return (n, 0);
    }
    let three = big3();
    let mut count = 0;
    loop {
        let (q, r) = n.div_rem(&three);
        if !r.is_zero() {
            return (n, count);
        }
        n = q;
        count += 1;
    }
}

impl Exact {
    pub fn zero() -> Self {
        Exact {
            mant: BigRational::zero(),
            exp3: 0,
        }
    }

    pub fn one() -> Self {
        Exact::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Exact::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Exact::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `3^e` for any integer `e`.
    pub fn pow3(e: i64) -> Self {
        Exact {
            mant: BigRational::one(),
            exp3: e,
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        if q.is_zero() {
            return Exact::zero();
        }
        let (n, en) = strip3(q.numer().clone());
        let (d, ed) = strip3(q.denom().clone());
        Exact {
            mant: BigRational::new(n, d),
            exp3: en - ed,
        }
    }

    /// The exact binary value of a finite `f64`.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Exact::from_rational)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.mant.is_zero() {
            0
        } else if self.mant.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        Exact {
            mant: self.mant.abs(),
            exp3: self.exp3,
        }
    }

    /// Multiplies by `3^n` exactly.
    pub fn scale3(&self, n: i64) -> Self {
        if self.is_zero() {
            return Exact::zero();
        }
        Exact {
            mant: self.mant.clone(),
            exp3: self.exp3 + n,
        }
    }

    pub fn mantissa(&self) -> &BigRational {
        &self.mant
    }

    pub fn exp3(&self) -> i64 {
        self.exp3
    }

    /// Expands into a plain rational. The cost grows with `|exp3|`.
    pub fn to_rational(&self) -> BigRational {
        match self.exp3.cmp(&0) {
            Ordering::Equal => self.mant.clone(),
            Ordering::Greater => self.mant.clone() * BigRational::from_integer(pow3_int(self.exp3 as u64)),
            Ordering::Less => {
                self.mant.clone() / BigRational::from_integer(pow3_int(self.exp3.unsigned_abs()))
            }
        }
    }

    /// Nearest `f64` (correctly rounded while `|exp3| <= 64`, within a few
    /// ulps beyond that); saturates to `0` or `inf` outside the double range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.exp3.abs() <= 64 {
            let (f, b) = rational_parts(&self.to_rational());
            return assemble(f, b, 0);
        }
        let (f, b) = rational_parts(&self.mant);
        assemble(f, b, self.exp3)
    }

    /// Approximate `log3 |self|`; `-inf` for zero.
    pub fn log3_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let n = self.mant.numer().magnitude();
        let d = self.mant.denom().magnitude();
        let ln = big_ln(n) - big_ln(d);
        ln / 3f64.ln() + self.exp3 as f64
    }

    /// Largest integer `j` with `3^j <= self`; `None` for nonpositive values.
    pub fn floor_log3(&self) -> Option<i64> {
        if !self.is_positive() {
            return None;
        }
        let guess = self.log3_abs().floor() as i64;
        // correct the float guess exactly
        let mut j = guess;
        while Exact::pow3(j) > *self {
            j -= 1;
        }
        while Exact::pow3(j + 1) <= *self {
            j += 1;
        }
        Some(j)
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        self.to_rational().floor().to_integer()
    }

    /// Renders as `p/q` with `q >= 1`.
    pub fn to_fraction_string(&self) -> String {
        let q = self.to_rational();
        format!("{}/{}", q.numer(), q.denom())
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn aligned(a: &Exact, b: &Exact) -> (BigRational, BigRational, i64) {
        let e = a.exp3.min(b.exp3);
        let lift = |x: &Exact| {
            let gap = (x.exp3 - e) as u64;
            if gap == 0 {
                x.mant.clone()
            } else {
                x.mant.clone() * BigRational::from_integer(pow3_int(gap))
            }
        };
        (lift(a), lift(b), e)
    }

    fn from_parts(mant: BigRational, exp3: i64) -> Exact {
        if mant.is_zero() {
            return Exact::zero();
        }
        let (n, en) = strip3(mant.numer().clone());
        let (d, ed) = strip3(mant.denom().clone());
        Exact {
            mant: BigRational::new(n, d),
            exp3: exp3 + en - ed,
        }
    }
}

fn big_ln(n: &num_bigint::BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl Default for Exact {
    fn default() -> Self {
        Exact::zero()
    }
}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        if (self.exp3 - other.exp3).abs() > LOG_COMPARE_GAP {
            let (la, lb) = (self.log3_abs(), other.log3_abs());
            if (la - lb).abs() > 4.0 {
                let mag = la.partial_cmp(&lb).unwrap_or(Ordering::Equal);
                return if sa > 0 { mag } else { mag.reverse() };
            }
        }
        let (a, b, _) = Exact::aligned(self, other);
        a.cmp(&b)
    }
}

impl Add for &Exact {
    type Output = Exact;
    fn add(self, rhs: &Exact) -> Exact {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = Exact::aligned(self, rhs);
        Exact::from_parts(a + b, e)
    }
}

impl Sub for &Exact {
    type Output = Exact;
    fn sub(self, rhs: &Exact) -> Exact {
        self + &(-rhs)
    }
}

impl Mul for &Exact {
    type Output = Exact;
    fn mul(self, rhs: &Exact) -> Exact {
        if self.is_zero() || rhs.is_zero() {
            return Exact::zero();
        }
        Exact {
            mant: &self.mant * &rhs.mant,
            exp3: self.exp3 + rhs.exp3,
        }
    }
}

impl Div for &Exact {
    type Output = Exact;
    fn div(self, rhs: &Exact) -> Exact {
        assert!(!rhs.is_zero(), "division of an exact scalar by zero");
        if self.is_zero() {
            return Exact::zero();
        }
        Exact {
            mant: &self.mant / &rhs.mant,
            exp3: self.exp3 - rhs.exp3,
        }
    }
}

impl Neg for &Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            mant: -self.mant.clone(),
            exp3: self.exp3,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Exact {
            type Output = Exact;
            fn $method(self, rhs: Exact) -> Exact {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Exact> for Exact {
            type Output = Exact;
            fn $method(self, rhs: &Exact) -> Exact {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        -&self
    }
}

impl From<i64> for Exact {
    fn from(n: i64) -> Self {
        Exact::from_integer(n)
    }
}

impl From<BigRational> for Exact {
    fn from(q: BigRational) -> Self {
        Exact::from_rational(q)
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp3 == 0 {
            write!(f, "{}", self.mant)
        } else {
            write!(f, "{}*3^{}", self.mant, self.exp3)
        }
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp3.abs() <= 4096 {
            f.write_str(&self.to_fraction_string())
        } else {
            let m = &self.mant;
            write!(f, "{}/{}*3^{}", m.numer(), m.denom(), self.exp3)
        }
    }
}

impl FromStr for Exact {
    type Err = Error;

    /// Accepts `p/q`, integers and plain decimals such as `0.25` or `-1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not an exact number: {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Exact::from_rational(BigRational::new(p, q)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            let mut n: BigInt = digits.parse().map_err(|_| bad())?;
            if negative {
                n = -n;
            }
            let d = num_traits::pow::pow(BigInt::from(10u8), frac.len());
            return Ok(Exact::from_rational(BigRational::new(n, d)));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Exact::from_rational(BigRational::from_integer(n)))
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A scalar that is either exact or an ordinary double.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(Exact),
    Float(f64),
}

impl Real {
    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(e) => e.to_f64(),
            Real::Float(x) => *x,
        }
    }

    /// Exact view; floats are converted by their binary value.
    pub fn to_exact(&self) -> Option<Exact> {
        match self {
            Real::Exact(e) => Some(e.clone()),
            Real::Float(x) => Exact::from_f64(*x),
        }
    }

    pub fn as_exact(&self) -> Option<&Exact> {
        match self {
            Real::Exact(e) => Some(e),
            Real::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Real::Exact(e) => e.is_positive(),
            Real::Float(x) => *x > 0.0,
        }
    }

    /// `self / other` rendered as a double, computed exactly when both are
    /// exact.
    pub fn ratio_f64(&self, other: &Real) -> f64 {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => (a / b).to_f64(),
            _ => self.to_f64() / other.to_f64(),
        }
    }

    pub fn scaled(&self, factor: &Real) -> Real {
        match (self, factor) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a * b),
            _ => Real::Float(self.to_f64() * factor.to_f64()),
        }
    }
}

impl From<Exact> for Real {
    fn from(e: Exact) -> Self {
        Real::Exact(e)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Float(x)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(e) => write!(f, "{e}"),
            Real::Float(x) => write!(f, "{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_view_survives_huge_mantissas() {
        // (3^5000 - 2) / 3^5000, then the same shifted far below f64 range
        let a = Exact::pow3(-5000);
        let b = &Exact::pow3(-10000) * &Exact::from_integer(2);
        let diff = &a - &b;
        assert!(((&diff / &a).to_f64() - 1.0).abs() < 1e-15);
        assert_eq!(diff.to_f64(), 0.0);
        let big = &(&Exact::pow3(3000) - &Exact::from_integer(2)) / &Exact::pow3(2999);
        assert!((big.to_f64() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_form_strips_threes() {
        let a = Exact::ratio(9, 2);
        assert_eq!(a.exp3(), 2);
        assert_eq!(a, Exact::ratio(1, 2).scale3(2));
        assert_eq!(Exact::ratio(1, 3) + Exact::ratio(2, 3), Exact::one());
    }

    #[test]
    fn huge_exponents_stay_cheap() {
        let r40 = Exact::pow3(-820);
        let r41 = Exact::pow3(-861);
        assert!(r40 > &r41 * &Exact::from_integer(2));
        assert_eq!((&r40 / &r41).to_f64(), 3f64.powi(41));
        assert_eq!(r40.to_f64(), 0.0);
        let ratio = (&(&r40 + &r41) / &r40).to_f64();
        assert!((ratio - (1.0 + 3f64.powi(-41))).abs() < 1e-15);
    }

    #[test]
    fn ordering_with_far_apart_exponents() {
        let big = Exact::pow3(10_000);
        let tiny = Exact::pow3(-10_000);
        assert!(tiny < big);
        assert!(-&big < -&tiny);
        assert!(Exact::zero() < tiny);
        assert_eq!(Exact::ratio(5, 7).cmp(&Exact::ratio(5, 7)), Ordering::Equal);
    }

    #[test]
    fn parse_forms() {
        assert_eq!("8/3".parse::<Exact>().unwrap(), Exact::ratio(8, 3));
        assert_eq!("0.25".parse::<Exact>().unwrap(), Exact::ratio(1, 4));
        assert_eq!("-1.5".parse::<Exact>().unwrap(), Exact::ratio(-3, 2));
        assert_eq!("12".parse::<Exact>().unwrap(), Exact::from_integer(12));
        assert!("1/0".parse::<Exact>().is_err());
        assert!("abc".parse::<Exact>().is_err());
        assert_eq!(Exact::from_integer(2).to_fraction_string(), "2/1");
    }

    #[test]
    fn floor_log3_is_exact() {
        assert_eq!(Exact::from_integer(1).floor_log3(), Some(0));
        assert_eq!(Exact::from_integer(3).floor_log3(), Some(1));
        assert_eq!(Exact::ratio(8, 3).floor_log3(), Some(0));
        assert_eq!(Exact::ratio(1, 3).floor_log3(), Some(-1));
        assert_eq!(Exact::ratio(1, 4).floor_log3(), Some(-2));
        assert_eq!(Exact::pow3(-5000).floor_log3(), Some(-5000));
    }
}
